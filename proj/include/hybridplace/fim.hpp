#pragma once

#include <optional>

#include "hybridplace/linalg.hpp"
#include "hybridplace/problem.hpp"

namespace hybridplace {

/// The fixed 2D rotation constant [[0,1],[-1,0]] from the bearing
/// information term.
const Mat& rotation_u();

/// The m x m information weights R1 = Sigma_toa^-1 + eta^2 D Sigma_rss^-1 D
/// and (2D only) R2 = D Sigma_aoa^-1 D.
struct InformationWeights {
  SymMatrix r1;
  std::optional<SymMatrix> r2;
};
InformationWeights information_weights(const DesignProblem& p);

/// Compact (H, R) form of the hybrid information: R1 carries TOA+RSS,
/// R2 carries AOA (absent for the 3D reduced model), H stacks [J; J U].
struct HybridForm {
  SymMatrix r1;                // m x m
  std::optional<SymMatrix> r2; // m x m, 2D only
  Mat j;                       // m x n

  static HybridForm from_problem(const DesignProblem& p, const Orientation& j);

  int sensor_count() const { return j.rows(); }
  int dimension() const { return j.cols(); }
  Mat h() const;                // [J; J U] (2D) or J (reduced)
  Mat r_blkdiag() const;        // blkdiag(R1, R2) or R1
  SymMatrix information() const;  // H^T R H, n x n
};

struct FimResult {
  SymMatrix f;           // Fisher information, n x n
  SymMatrix crlb;        // f^{-1}, meters^2
  double trace_crlb;     // A value
  double neg_log_det_f;  // D value
  double max_eig_crlb;   // E value
};

SymMatrix fim_toa(const Orientation& j, const SymMatrix& sigma_toa);
SymMatrix fim_rss(const Orientation& j, const DistanceProfile& d, double eta,
                  const SymMatrix& sigma_rss);
/// 2D only; 3D bearings are outside this model.
SymMatrix fim_aoa(const Orientation& j, const DistanceProfile& d,
                  const SymMatrix& sigma_aoa);

/// Sum of the per-modality terms; also cross-checked against the compact
/// H^T R H form. Throws SingularMatrixError when F is not invertible.
FimResult hybrid_fim(const DesignProblem& p, const Orientation& j);

double criterion_value(const DesignProblem& p, const Orientation& j,
                       Criterion crit);

}  // namespace hybridplace
