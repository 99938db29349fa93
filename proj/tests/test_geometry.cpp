#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybridplace/errors.hpp"
#include "hybridplace/geometry.hpp"
#include "hybridplace/rng.hpp"

using namespace hybridplace;

namespace {
constexpr double kPi = 3.14159265358979323846;

TargetSensorConfig make_config(std::vector<double> target,
                               std::vector<std::vector<double>> sensors) {
  TargetSensorConfig cfg;
  cfg.target = std::move(target);
  const int n = static_cast<int>(cfg.target.size());
  cfg.sensors = Mat(static_cast<int>(sensors.size()), n);
  for (size_t i = 0; i < sensors.size(); ++i)
    for (int k = 0; k < n; ++k) cfg.sensors(static_cast<int>(i), k) = sensors[i][k];
  return cfg;
}
}  // namespace

TEST_CASE("axis-aligned row") {
  const auto [j, d] = orientation_from_positions(
      make_config({0, 0}, {{-10, 0}, {0, -10}}));
  CHECK(j.j()(0, 0) == doctest::Approx(1.0));
  CHECK(j.j()(0, 1) == doctest::Approx(0.0));
  CHECK(d.d[0] == doctest::Approx(10.0));
}

TEST_CASE("45-degree row") {
  const auto [j, d] = orientation_from_positions(
      make_config({0, 0}, {{-1, -1}, {1, 1}}));
  CHECK(j.j()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(j.j()(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(d.d[0] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("uniform four-sensor cross at radius 10") {
  const auto [j, d] = orientation_from_positions(
      make_config({0, 0}, {{10, 0}, {0, 10}, {-10, 0}, {0, -10}}));
  const double want[4][2] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1}};
  for (int i = 0; i < 4; ++i) {
    CHECK(j.j()(i, 0) == doctest::Approx(want[i][0]));
    CHECK(j.j()(i, 1) == doctest::Approx(want[i][1]));
    CHECK(d.d[i] == doctest::Approx(10.0));
  }
}

TEST_CASE("positions from orientation, axis case") {
  const Orientation j(Mat(2, 2, {1, 0, 0, 1}));
  const TargetSensorConfig cfg =
      positions_from_orientation(j, DistanceProfile({10.0, 5.0}), {0.0, 0.0});
  CHECK(cfg.sensors(0, 0) == doctest::Approx(-10.0));
  CHECK(cfg.sensors(0, 1) == doctest::Approx(0.0));
  CHECK(cfg.sensors(1, 1) == doctest::Approx(-5.0));
}

TEST_CASE("unit-norm rows at unit distance land on the unit circle") {
  const Orientation j(Mat(3, 2, {1, 0, 0, 1, -1, 0}));
  const TargetSensorConfig cfg =
      positions_from_orientation(j, DistanceProfile({1, 1, 1}), {0.0, 0.0});
  for (int i = 0; i < 3; ++i) {
    const double r = std::hypot(cfg.sensors(i, 0), cfg.sensors(i, 1));
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("orientation/positions round-trip") {
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    const int m = 2 + static_cast<int>(rng.uniform01() * 5);
    std::vector<RowAngles> angles(m);
    for (auto& a : angles) {
      a.theta = rng.uniform(-kPi, kPi);
      a.phi = n == 3 ? rng.uniform(-kPi / 2 + 0.1, kPi / 2 - 0.1) : 0.0;
    }
    const Orientation j = orientation_from_angles(angles, n);
    std::vector<double> dists(m), target(n);
    for (auto& d : dists) d = rng.uniform(0.5, 20.0);
    for (auto& t : target) t = rng.uniform(-5.0, 5.0);
    const DistanceProfile dp(dists);
    const TargetSensorConfig cfg = positions_from_orientation(j, dp, target);
    const auto [j2, dp2] = orientation_from_positions(cfg);
    CHECK((j2.j() - j.j()).frobenius_norm() < 1e-9);
    for (int i = 0; i < m; ++i) CHECK(std::fabs(dp2.d[i] - dp.d[i]) < 1e-9);
  }
}

TEST_CASE("angle view basics") {
  const Orientation j(Mat(2, 2, {1, 0, 0, -1}));
  const auto a = angles_from_orientation(j);
  CHECK(a[0].theta == doctest::Approx(0.0));
  CHECK(a[1].theta == doctest::Approx(-kPi / 2));
}

TEST_CASE("3D pole convention") {
  const Orientation j(Mat(2, 3, {0, 0, 1, 0, 0, -1}));
  const auto a = angles_from_orientation(j);
  CHECK(a[0].phi == doctest::Approx(kPi / 2));
  CHECK(a[0].theta == 0.0);
  CHECK(a[1].phi == doctest::Approx(-kPi / 2));
  CHECK(a[1].theta == 0.0);
}

TEST_CASE("angle round-trip reconstructs J") {
  RngStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    Mat raw(4, n);
    for (int i = 0; i < 4; ++i) {
      std::vector<double> v(n);
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        v[k] = rng.normal();
        s += v[k] * v[k];
      }
      for (int k = 0; k < n; ++k) raw(i, k) = v[k] / std::sqrt(s);
    }
    const Orientation j(raw);
    const Orientation back = orientation_from_angles(angles_from_orientation(j), n);
    CHECK((back.j() - j.j()).frobenius_norm() < 1e-12);
  }
}

TEST_CASE("theta stays in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
}

TEST_CASE("rows outside the unit tolerance are rejected, not renormalized") {
  Mat bad(1, 2, {1.0 + 1e-6, 0.0});
  CHECK_THROWS_AS(Orientation{bad}, InvalidInputError);
}

TEST_CASE("coincident sensor and target") {
  CHECK_THROWS_AS(
      orientation_from_positions(make_config({0, 0}, {{0, 0}, {1, 0}})),
      DegenerateGeometryError);
}

TEST_CASE("at least two sensors") {
  CHECK_THROWS_AS(orientation_from_positions(make_config({0, 0}, {{1, 0}})),
                  InvalidInputError);
}

TEST_CASE("uniform orientation patterns") {
  const Orientation u4 = uniform_orientation(4, 2);
  CHECK(u4.j()(0, 0) == doctest::Approx(1.0));
  CHECK(u4.j()(1, 1) == doctest::Approx(1.0));
  const Orientation u6 = uniform_orientation(6, 3);
  CHECK(u6.j()(2, 2) == doctest::Approx(1.0));
  const Orientation u5 = uniform_orientation(5, 3);
  for (int i = 0; i < 5; ++i) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += u5.j()(i, k) * u5.j()(i, k);
    CHECK(std::fabs(std::sqrt(s) - 1.0) <= 1e-9);
  }
}
