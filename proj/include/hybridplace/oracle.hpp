#pragma once

#include <utility>
#include <vector>

#include "hybridplace/problem.hpp"

namespace hybridplace {

/// Uniform-diagonal-noise inputs of the closed-form trace bound: scalar
/// standard deviations per modality plus the ranges.
struct TheoreticalCrlbInput {
  int m = 0;
  std::vector<double> distances;  // meters
  double gamma = 1.0;             // range std, meters
  double sigma = 1.0;             // power std, dB
  double tau = 1.0;               // bearing std, radians
  double eta = 0.0;

  void validate() const;
};

/// 4 / sum_i (eta^2/(d_i^2 sigma^2) + 1/(d_i^2 tau^2) + 1/gamma^2).
double theoretical_trace_crlb(const TheoreticalCrlbInput& in);

struct BruteForceResult {
  Orientation orientation;
  double value = 0.0;
  double resolution_deg = 0.0;
};

/// Exhaustive search over the m-fold product of azimuth grids covering
/// [0, 360) degrees. 2D, m <= 3, resolution >= 0.5 degrees; anything else
/// is refused. Deterministic: ties resolve to the smallest flat grid index.
BruteForceResult brute_force_design(const DesignProblem& problem,
                                    double resolution_deg);

/// ||J^T J - (m/2) I_2||_F, the uniform-noise optimality deviation.
double check_half_identity(const Orientation& j);

/// |value(res) - value(res/2)| + 1e-9: the empirical grid slack used when
/// comparing solver results against the grid minimum.
double measured_grid_slack(const DesignProblem& problem, double resolution_deg);

}  // namespace hybridplace
