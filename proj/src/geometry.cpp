#include "hybridplace/geometry.hpp"

#include <cmath>
#include <string>

#include "hybridplace/errors.hpp"

namespace hybridplace {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

void TargetSensorConfig::validate() const {
  const int n = dimension();
  if (n != 2 && n != 3)
    throw InvalidInputError("TargetSensorConfig: dimension must be 2 or 3");
  if (sensors.cols() != n)
    throw InvalidInputError("TargetSensorConfig: sensor dimension mismatch");
  if (sensor_count() < 2)
    throw InvalidInputError("TargetSensorConfig: at least 2 sensors required");
  for (int i = 0; i < sensor_count(); ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double diff = target[k] - sensors(i, k);
      s += diff * diff;
    }
    if (!(s > 0.0))
      throw DegenerateGeometryError("sensor " + std::to_string(i) +
                                    " coincides with the target");
  }
}

DistanceProfile::DistanceProfile(std::vector<double> dist) : d(std::move(dist)) {
  for (size_t i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0) || !std::isfinite(d[i]))
      throw InvalidInputError("DistanceProfile: d[" + std::to_string(i) +
                              "] must be positive and finite");
}

Mat DistanceProfile::reciprocal_diag() const {
  std::vector<double> r(d.size());
  for (size_t i = 0; i < d.size(); ++i) r[i] = 1.0 / d[i];
  return Mat::diag(r);
}

Orientation::Orientation(Mat j) : j_(std::move(j)) {
  const int n = j_.cols();
  if (n != 2 && n != 3)
    throw InvalidInputError("Orientation: dimension must be 2 or 3");
  if (j_.rows() < 1) throw InvalidInputError("Orientation: no rows");
  if (!j_.all_finite()) throw InvalidInputError("Orientation: non-finite entry");
  for (int i = 0; i < j_.rows(); ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += j_(i, k) * j_(i, k);
    if (std::fabs(std::sqrt(s) - 1.0) > kRowUnitTol)
      throw InvalidInputError("Orientation: row " + std::to_string(i) +
                              " is not unit-norm (|norm-1| > 1e-9)");
  }
}

std::pair<Orientation, DistanceProfile> orientation_from_positions(
    const TargetSensorConfig& cfg) {
  cfg.validate();
  const int m = cfg.sensor_count();
  const int n = cfg.dimension();
  Mat j(m, n);
  std::vector<double> d(m);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double diff = cfg.target[k] - cfg.sensors(i, k);
      j(i, k) = diff;
      s += diff * diff;
    }
    d[i] = std::sqrt(s);
    for (int k = 0; k < n; ++k) j(i, k) /= d[i];
  }
  return {Orientation(j), DistanceProfile(d)};
}

TargetSensorConfig positions_from_orientation(const Orientation& j,
                                              const DistanceProfile& d,
                                              const std::vector<double>& target) {
  const int m = j.sensor_count();
  const int n = j.dimension();
  if (d.count() != m)
    throw InvalidInputError("positions_from_orientation: distance count mismatch");
  if (static_cast<int>(target.size()) != n)
    throw InvalidInputError("positions_from_orientation: target dimension mismatch");
  TargetSensorConfig cfg;
  cfg.target = target;
  cfg.sensors = Mat(m, n);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k)
      cfg.sensors(i, k) = target[k] - d.d[i] * j.j()(i, k);
  return cfg;
}

std::vector<RowAngles> angles_from_orientation(const Orientation& j) {
  const int m = j.sensor_count();
  std::vector<RowAngles> out(m);
  if (j.dimension() == 2) {
    for (int i = 0; i < m; ++i) {
      out[i].theta = wrap_angle(std::atan2(j.j()(i, 1), j.j()(i, 0)));
      out[i].phi = 0.0;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const double x = j.j()(i, 0), y = j.j()(i, 1), z = j.j()(i, 2);
      const double c = std::hypot(x, y);
      out[i].phi = std::atan2(z, c);
      // Pole convention: azimuth undefined at cos(phi) = 0, fixed to 0.
      out[i].theta = c == 0.0 ? 0.0 : wrap_angle(std::atan2(y, x));
    }
  }
  return out;
}

Orientation orientation_from_angles(const std::vector<RowAngles>& angles, int n) {
  const int m = static_cast<int>(angles.size());
  Mat j(m, n);
  for (int i = 0; i < m; ++i) {
    if (n == 2) {
      j(i, 0) = std::cos(angles[i].theta);
      j(i, 1) = std::sin(angles[i].theta);
    } else {
      j(i, 0) = std::cos(angles[i].phi) * std::cos(angles[i].theta);
      j(i, 1) = std::cos(angles[i].phi) * std::sin(angles[i].theta);
      j(i, 2) = std::sin(angles[i].phi);
    }
  }
  return Orientation(j);
}

Orientation uniform_orientation(int m, int n) {
  if (m < 1) throw InvalidInputError("uniform_orientation: m must be >= 1");
  Mat j(m, n);
  if (n == 2) {
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * kPi * i / m;
      j(i, 0) = std::cos(a);
      j(i, 1) = std::sin(a);
    }
  } else if (n == 3) {
    if (m == 6) {
      const double oct[6][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
      for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 3; ++k) j(i, k) = oct[i][k];
    } else {
      // Fibonacci sphere lattice.
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < m; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        j(i, 0) = r * std::cos(a);
        j(i, 1) = r * std::sin(a);
        j(i, 2) = z;
      }
      // Renormalize against roundoff so construction tolerance holds.
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += j(i, k) * j(i, k);
        s = std::sqrt(s);
        for (int k = 0; k < 3; ++k) j(i, k) /= s;
      }
    }
  } else {
    throw InvalidInputError("uniform_orientation: dimension must be 2 or 3");
  }
  return Orientation(j);
}

}  // namespace hybridplace
