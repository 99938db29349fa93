#pragma once

#include <cstdint>
#include <vector>

#include "hybridplace/geometry.hpp"
#include "hybridplace/models.hpp"

namespace hybridplace {

/// Square search grid for the likelihood scan (2D).
struct GridSpec {
  std::vector<double> center;  // 2-vector, meters
  double half_width = 0.0;     // meters, > 0
  int resolution = 201;        // points per axis, >= 3

  void validate() const;
  /// Centered at the sensor centroid with half-width 1.5x the largest
  /// design range.
  static GridSpec default_for(const TargetSensorConfig& placement);
};

struct EstimateResult {
  std::vector<double> r_hat;        // refined estimate
  double nll = 0.0;                 // negative log-likelihood at r_hat
  std::vector<double> grid_argmin;  // pre-refinement grid point
  double gn_step_norm = 0.0;        // attempted Gauss-Newton step length
  bool gn_accepted = false;         // false when the step was rejected
};

struct MseReport {
  int trials = 0;
  double mse = 0.0;                    // mean of squared position errors
  std::vector<double> squared_errors;  // per trial, meters^2
  uint64_t seed = 0;
  int failures = 0;  // trials whose estimation failed
  bool valid = true; // false when failures exceed 1% of trials
};

/// 1/2 sum over blocks of resid^T Sigma^{-1} resid, constants dropped;
/// bearing residuals wrapped to (-pi, pi]. +inf when the candidate sits on
/// a sensor.
double neg_log_likelihood(const HybridMeasurement& q,
                          const std::vector<double>& candidate,
                          const Mat& sensors, const NoiseModel& noise,
                          const ModelConstants& k);

/// Grid argmin of the NLL followed by exactly one Gauss-Newton step; the
/// step is rejected (grid argmin kept) when it does not improve the NLL.
EstimateResult mle_estimate(const HybridMeasurement& q, const Mat& sensors,
                            const NoiseModel& noise, const ModelConstants& k,
                            const GridSpec& grid);

/// Per-trial: sample a measurement from an independent seeded stream,
/// estimate, accumulate the squared error. Trials run in parallel; the
/// report is identical regardless of scheduling.
MseReport monte_carlo_mse(const TargetSensorConfig& placement,
                          const NoiseModel& noise, const ModelConstants& k,
                          int trials, const GridSpec& grid, uint64_t seed);

}  // namespace hybridplace
