#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "hybridplace/errors.hpp"

namespace hybridplace {

/// Small dense row-major matrix. Everything in this toolkit is tiny
/// (design matrices are n x n with n in {2,3}, covariances m x m with
/// m <= ~50), so plain loops beat any BLAS dispatch overhead.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw InvalidInputError("Mat: negative dimension");
  }
  Mat(int rows, int cols, std::initializer_list<double> vals) : Mat(rows, cols) {
    if (static_cast<int>(vals.size()) != rows * cols)
      throw InvalidInputError("Mat: initializer size mismatch");
    size_t i = 0;
    for (double v : vals) a_[i++] = v;
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat diag(const std::vector<double>& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  Mat transposed() const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator*(const Mat& o) const;   // matrix product
  Mat operator*(double s) const;

  std::vector<double> col(int j) const;
  std::vector<double> row(int i) const;
  void set_row(int i, const std::vector<double>& v);

  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  const std::vector<double>& data() const { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

Mat operator*(double s, const Mat& m);

/// Matrix-vector and vector helpers used throughout.
std::vector<double> mat_vec(const Mat& m, const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

/// Symmetric real matrix; storage is exactly symmetric by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : m_(dim, dim) {
    if (dim < 1) throw InvalidInputError("SymMatrix: dim must be >= 1");
  }

  /// Rejects any entry pair with entries[i][j] != entries[j][i].
  static SymMatrix require_symmetric(const Mat& m);
  /// (M + M^T)/2, for products that are symmetric up to roundoff.
  static SymMatrix symmetrize(const Mat& m);
  static SymMatrix identity(int n) { return require_symmetric(Mat::identity(n)); }
  static SymMatrix diag(const std::vector<double>& d) {
    return require_symmetric(Mat::diag(d));
  }

  int dim() const { return m_.rows(); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Mat& mat() const { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

 private:
  Mat m_;
};

struct EvdResult {
  std::vector<double> eigenvalues;  // sorted descending
  Mat eigenvectors;                 // orthonormal columns, matching order
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Deterministic: eigenvalues descending, each eigenvector's
/// largest-magnitude component made positive.
EvdResult sym_evd(const SymMatrix& m);

/// Lower-triangular L with L L^T = M. Throws NotPositiveDefiniteError
/// naming the failing pivot index for non-PD input.
Mat cholesky(const SymMatrix& m);

/// Inverse via EVD; throws SingularMatrixError (with the eigenvalue-ratio
/// condition estimate) when the estimate exceeds 1e12.
SymMatrix inverse(const SymMatrix& m);

double determinant(const SymMatrix& m);
double smallest_eigenvalue(const SymMatrix& m);
double largest_eigenvalue(const SymMatrix& m);
bool is_positive_definite(const SymMatrix& m);

/// Largest eigenvalue magnitude over smallest; +inf when singular.
double condition_estimate(const SymMatrix& m);

}  // namespace hybridplace
