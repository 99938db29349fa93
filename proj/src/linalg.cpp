#include "hybridplace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hybridplace {

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::operator+(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw InvalidInputError("Mat+: shape mismatch");
  Mat r(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw InvalidInputError("Mat-: shape mismatch");
  Mat r(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

Mat Mat::operator*(const Mat& o) const {
  if (cols_ != o.rows_) throw InvalidInputError("Mat*: shape mismatch");
  Mat r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
    }
  return r;
}

Mat Mat::operator*(double s) const {
  Mat r = *this;
  for (auto& v : r.a_) v *= s;
  return r;
}

Mat operator*(double s, const Mat& m) { return m * s; }

std::vector<double> Mat::col(int j) const {
  std::vector<double> v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<double> Mat::row(int i) const {
  std::vector<double> v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

void Mat::set_row(int i, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != cols_)
    throw InvalidInputError("Mat::set_row: size mismatch");
  for (int j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
}

double Mat::trace() const {
  double t = 0.0;
  const int n = std::min(rows_, cols_);
  for (int i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

double Mat::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Mat::max_abs() const {
  double s = 0.0;
  for (double v : a_) s = std::max(s, std::fabs(v));
  return s;
}

bool Mat::all_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> mat_vec(const Mat& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.cols())
    throw InvalidInputError("mat_vec: size mismatch");
  std::vector<double> r(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

SymMatrix SymMatrix::require_symmetric(const Mat& m) {
  if (m.rows() != m.cols())
    throw InvalidInputError("SymMatrix: matrix is not square");
  if (m.rows() < 1) throw InvalidInputError("SymMatrix: dim must be >= 1");
  if (!m.all_finite()) throw InvalidInputError("SymMatrix: non-finite entry");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i))
        throw InvalidInputError("SymMatrix: entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") != (" + std::to_string(j) +
                                "," + std::to_string(i) + ")");
  SymMatrix s;
  s.m_ = m;
  return s;
}

SymMatrix SymMatrix::symmetrize(const Mat& m) {
  if (m.rows() != m.cols())
    throw InvalidInputError("SymMatrix: matrix is not square");
  if (!m.all_finite()) throw InvalidInputError("SymMatrix: non-finite entry");
  SymMatrix s;
  s.m_ = Mat(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    s.m_(i, i) = m(i, i);
    for (int j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  }
  return s;
}

namespace {

double off_diagonal_frobenius(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EvdResult sym_evd(const SymMatrix& m) {
  const int n = m.dim();
  if (n > 64) throw InvalidInputError("sym_evd: dim > 64 unsupported");
  if (!m.mat().all_finite()) throw InvalidInputError("sym_evd: non-finite entry");

  Mat a = m.mat();
  Mat v = Mat::identity(n);
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  const double tol = 1e-12 * scale;

  // Cyclic Jacobi sweeps until the off-diagonal mass is negligible.
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_frobenius(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p), arq = a(r, q);
            a(r, p) = arp - s * (arq + tau * arp);
            a(p, r) = a(r, p);
            a(r, q) = arq + s * (arp - tau * arq);
            a(q, r) = a(r, q);
          }
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  EvdResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    r.eigenvalues[k] = a(src, src);
    // Sign convention: largest-magnitude component positive.
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::fabs(v(i, src)) > std::fabs(v(imax, src))) imax = i;
    const double sgn = v(imax, src) < 0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) r.eigenvectors(i, k) = sgn * v(i, src);
  }
  return r;
}

Mat cholesky(const SymMatrix& m) {
  const int n = m.dim();
  Mat l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw NotPositiveDefiniteError(
          "cholesky: matrix not positive definite at pivot " + std::to_string(j),
          j);
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

double condition_estimate(const SymMatrix& m) {
  const EvdResult e = sym_evd(m);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double ev : e.eigenvalues) {
    lo = std::min(lo, std::fabs(ev));
    hi = std::max(hi, std::fabs(ev));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

SymMatrix inverse(const SymMatrix& m) {
  const EvdResult e = sym_evd(m);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double ev : e.eigenvalues) {
    lo = std::min(lo, std::fabs(ev));
    hi = std::max(hi, std::fabs(ev));
  }
  const double cond =
      lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
  if (!(cond < 1e12))
    throw SingularMatrixError(
        "inverse: matrix singular or ill-conditioned (condition estimate " +
            std::to_string(cond) + ")",
        cond);
  const int n = m.dim();
  Mat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += e.eigenvectors(i, k) * e.eigenvectors(j, k) / e.eigenvalues[k];
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return SymMatrix::require_symmetric(inv);
}

double determinant(const SymMatrix& m) {
  const EvdResult e = sym_evd(m);
  double d = 1.0;
  for (double ev : e.eigenvalues) d *= ev;
  return d;
}

double smallest_eigenvalue(const SymMatrix& m) {
  return sym_evd(m).eigenvalues.back();
}

double largest_eigenvalue(const SymMatrix& m) {
  return sym_evd(m).eigenvalues.front();
}

bool is_positive_definite(const SymMatrix& m) {
  return smallest_eigenvalue(m) > 0.0;
}

}  // namespace hybridplace
