#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hybridplace/fim.hpp"
#include "hybridplace/problem.hpp"

namespace hybridplace {

/// PSD dual matrix and its rotated companions (2D hybrid form).
struct DualState {
  SymMatrix phi;  // n x n, smallest eigenvalue >= -1e-10

  explicit DualState(SymMatrix p);

  /// U phi U^T; 2D only.
  Mat q() const;
  /// [phi, q], n x 2n; 2D only.
  Mat phi_tilde() const;
};

struct SolverOptions {
  double outer_tol = 1e-3;   // stop when ||J_{t+1}-J_t||_F/||J_t||_F is below
  double inner_tol = 1e-3;   // same rule on the dual iterates
  int max_outer = 500;
  int max_inner = 200;
  double norm_floor = 1e-12;  // floor for surrogate weights and primal columns
  bool random_phi_init = false;
  uint64_t seed = 0;
};

enum class TerminationReason { kConverged, kMaxIterations };

struct IterationRecord {
  int iter = 0;              // 0 is the initial state
  double criterion = 0.0;    // criterion value of J after this iteration
  int inner_iterations = 0;  // dual iterations spent this outer step
  double step_norm = 0.0;    // ||J_{t+1}-J_t||_F / ||J_t||_F
  int floor_hits = 0;        // norm-floor triggers (dual weights + primal columns)
};

struct DesignResult {
  explicit DesignResult(Orientation j) : j_star(std::move(j)) {}

  Orientation j_star;
  std::vector<IterationRecord> trace;
  TerminationReason status = TerminationReason::kConverged;
  bool perturbed_init = false;

  std::vector<double> criterion_trace() const;
};

struct DualUpdateResult {
  explicit DualUpdateResult(DualState s) : state(std::move(s)) {}

  DualState state;
  int iterations = 0;
  int floor_hits = 0;
  /// Dual objective after each inner step, starting with the initial point.
  std::vector<double> objective_trace;
};

/// Alternates the criterion-specific dual update with the closed-form primal
/// update until the relative Frobenius step drops below outer_tol.
DesignResult solve(const DesignProblem& problem, const Orientation& init,
                   const SolverOptions& opts = {});

/// Reduced TOA-RSS model: H = J and a single information weight, no
/// rotation block. Rejects problems carrying an AOA covariance.
DesignResult solve_3d_toa_rss(const DesignProblem& problem,
                              const Orientation& init,
                              const SolverOptions& opts = {});

/// Row i of the result is z_i/||z_i||; columns below norm_floor keep the
/// previous row (counted in floor_hits).
Mat primal_update(const Mat& z, const Mat& j_prev, double norm_floor,
                  int* floor_hits = nullptr);

/// Inner MM on the dual variable (A and D criteria). Converges to the global
/// minimum of the convex dual; the objective trace is non-increasing.
DualUpdateResult dual_update_ad(const HybridForm& form, Criterion crit,
                                const SymMatrix& phi_init,
                                const SolverOptions& opts = {});

/// Trace-constrained dual solve for the E criterion, 2D only: the trace-1
/// PSD matrices are parameterized as [[1/2+p, q], [q, 1/2-p]] on the disk
/// p^2+q^2 <= 1/4 and minimized by projected subgradient plus a zooming
/// local grid. Throws UnsupportedModelError for n != 2.
DualUpdateResult dual_update_e(const HybridForm& form,
                               const SolverOptions& opts = {});

/// E-criterion dual solve for any n via the same surrogate machinery as the
/// A/D inner loop with the simplex-projected diagonal subproblem. Used by the
/// 3D path of solve(); exposed for cross-validation.
DualUpdateResult dual_update_e_simplex(const HybridForm& form,
                                       const SymMatrix& phi_init,
                                       const SolverOptions& opts = {});

/// Unique positive root of 4*lambda*x^3 + 2*e*x - 1 = 0 (the A-criterion
/// scalar stationarity after the substitution X = x^2).
double cubic_positive_root(double e, double lambda);

/// Positive root of the D-criterion scalar stationarity
/// e + 2*lambda*X - 1/X = 0, i.e. (-e + sqrt(e^2 + 8*lambda)) / (4*lambda).
double quadratic_positive_root(double e, double lambda);

/// 2 Tr[Phi H_t^T R H] - Tr[Phi H_t^T R H_t]; a global lower bound of
/// Tr[Phi H^T R H] with equality at H = H_t.
double surrogate_lower_bound(const Mat& h, const Mat& h_t, const SymMatrix& phi,
                             const Mat& r);

/// ||pt a||^2 / (2 w) + w / 2 with w = max(||pt_k a||, norm_floor); an upper
/// bound of ||pt a|| with equality at pt = pt_k.
double surrogate_upper_bound_norm(const Mat& phi_tilde, const Mat& phi_tilde_k,
                                  const std::vector<double>& a,
                                  double norm_floor = 1e-12);

/// Minimizer and value of Tr(Phi M) - Tr(sqrt(Phi)) over PSD Phi for PD M:
/// Phi* = (1/4) M^{-2}, value = -(1/4) Tr(M^{-1}).
std::pair<SymMatrix, double> fenchel_min_value(const SymMatrix& m);

}  // namespace hybridplace
