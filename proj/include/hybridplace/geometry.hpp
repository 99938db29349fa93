#pragma once

#include <utility>
#include <vector>

#include "hybridplace/linalg.hpp"

namespace hybridplace {

/// Target plus sensor positions in meters, dimension n in {2,3}.
struct TargetSensorConfig {
  std::vector<double> target;  // size n
  Mat sensors;                 // m x n, one row per sensor

  int dimension() const { return static_cast<int>(target.size()); }
  int sensor_count() const { return sensors.rows(); }

  /// Throws on m < 2, dimension not in {2,3}, or a sensor coincident with
  /// the target.
  void validate() const;
};

/// Sensor-target ranges d_i and the diagonal matrix of their reciprocals.
struct DistanceProfile {
  std::vector<double> d;  // meters, all > 0

  explicit DistanceProfile(std::vector<double> dist);
  DistanceProfile() = default;

  int count() const { return static_cast<int>(d.size()); }
  Mat reciprocal_diag() const;  // diag(1/d_1, ..., 1/d_m)
};

/// The m x n design variable: unit rows pointing from each sensor to the
/// target. Construction rejects rows whose norm deviates from 1 by more
/// than 1e-9 rather than renormalizing silently.
class Orientation {
 public:
  explicit Orientation(Mat j);

  const Mat& j() const { return j_; }
  int sensor_count() const { return j_.rows(); }
  int dimension() const { return j_.cols(); }

  static constexpr double kRowUnitTol = 1e-9;

 private:
  Mat j_;
};

/// Azimuth (2D) or azimuth+elevation (3D) view of one orientation row.
struct RowAngles {
  double theta = 0.0;  // azimuth, (-pi, pi]
  double phi = 0.0;    // elevation, [-pi/2, pi/2]; 3D only
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

std::pair<Orientation, DistanceProfile> orientation_from_positions(
    const TargetSensorConfig& cfg);

TargetSensorConfig positions_from_orientation(const Orientation& j,
                                              const DistanceProfile& d,
                                              const std::vector<double>& target);

/// 2D rows give theta only. 3D rows give (theta, phi) with the pole
/// convention theta = 0 when cos(phi) = 0.
std::vector<RowAngles> angles_from_orientation(const Orientation& j);

/// Inverse of angles_from_orientation.
Orientation orientation_from_angles(const std::vector<RowAngles>& angles, int n);

/// Equispaced circle (2D) or a deterministic sphere covering (3D: the
/// axis-aligned octahedron for m = 6, a Fibonacci lattice otherwise).
Orientation uniform_orientation(int m, int n);

}  // namespace hybridplace
