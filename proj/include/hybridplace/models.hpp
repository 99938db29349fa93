#pragma once

#include <optional>
#include <vector>

#include "hybridplace/geometry.hpp"
#include "hybridplace/linalg.hpp"
#include "hybridplace/rng.hpp"

namespace hybridplace {

/// Signal and path-loss constants of the measurement model. eta is tied to
/// alpha by eta = -10 alpha / ln(10).
struct ModelConstants {
  double c = 299792458.0;  // signal speed, m/s
  double p0 = 0.0;         // source power at the target, dB
  double alpha = 1.0;      // path-loss exponent
  double eta = 0.0;        // -10 alpha / ln(10)

  static ModelConstants from_alpha(double alpha, double c = 299792458.0,
                                   double p0 = 0.0);
  static ModelConstants from_eta(double eta, double c = 299792458.0,
                                 double p0 = 0.0);
  void validate() const;
};

/// Per-modality noise covariances. TOA is stored in the range domain
/// (meters^2), i.e. the covariance of c*mu. Each matrix must be positive
/// definite, except that an exactly-zero matrix is accepted as the
/// noiseless limit. AOA is absent for the 3D reduced model.
struct NoiseModel {
  SymMatrix sigma_toa;                 // m x m, meters^2
  SymMatrix sigma_rss;                 // m x m, dB^2
  std::optional<SymMatrix> sigma_aoa;  // m x m, radians^2; 2D only

  int sensor_count() const { return sigma_toa.dim(); }
  void validate() const;
};

/// One stacked hybrid measurement: ranges, power offsets p_i - p0, bearings.
struct HybridMeasurement {
  std::vector<double> z;      // meters
  std::vector<double> p;      // dB
  std::vector<double> theta;  // radians, wrapped to (-pi, pi]; empty in 3D

  /// Concatenation [z; p; theta].
  std::vector<double> stacked() const;
};

/// Noiseless measurement values for a configuration. In 3D the bearing
/// block is empty (the reduced TOA-RSS model).
HybridMeasurement hybrid_mean(const TargetSensorConfig& cfg,
                              const ModelConstants& k);

/// Mean plus correlated Gaussian noise drawn from the given stream; the
/// three blocks use independent draws and bearings are re-wrapped.
HybridMeasurement sample_measurement(const TargetSensorConfig& cfg,
                                     const ModelConstants& k,
                                     const NoiseModel& noise, RngStream& rng);

/// Sigma = G G^T / m + floor * I with G entries iid U[0,1). Positive
/// definite by construction with smallest eigenvalue >= floor.
SymMatrix correlated_covariance_from_uniform(const Mat& g, double floor);
SymMatrix random_correlated_covariance(int m, double floor, uint64_t seed);

}  // namespace hybridplace
