#include "hybridplace/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hybridplace/errors.hpp"
#include "hybridplace/fim.hpp"
#include "hybridplace/parallel.hpp"

namespace hybridplace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 2x2 criterion from the hybrid information entries; +inf when singular.
double criterion_2x2(double f11, double f12, double f22, Criterion crit) {
  const double det = f11 * f22 - f12 * f12;
  const double tr = f11 + f22;
  if (!(det > 0.0) || !(tr > 0.0)) return kInf;
  switch (crit) {
    case Criterion::A:
      return tr / det;
    case Criterion::D:
      return -std::log(det);
    case Criterion::E: {
      const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
      return lmin > 0.0 ? 1.0 / lmin : kInf;
    }
  }
  return kInf;
}

struct GridBest {
  double value = kInf;
  long idx = -1;
};

// Strict improvement only, so ties resolve to the first (smallest) index.
void take_better(GridBest& best, double v, long idx) {
  if (v < best.value) {
    best.value = v;
    best.idx = idx;
  }
}

}  // namespace

void TheoreticalCrlbInput::validate() const {
  if (m < 1 || static_cast<int>(distances.size()) != m)
    throw InvalidInputError("TheoreticalCrlbInput: distance count mismatch");
  if (!(gamma > 0.0) || !(sigma > 0.0) || !(tau > 0.0))
    throw InvalidInputError("TheoreticalCrlbInput: stds must be positive");
  for (double d : distances)
    if (!(d > 0.0)) throw InvalidInputError("TheoreticalCrlbInput: d must be > 0");
}

double theoretical_trace_crlb(const TheoreticalCrlbInput& in) {
  in.validate();
  double s = 0.0;
  for (double d : in.distances)
    s += in.eta * in.eta / (d * d * in.sigma * in.sigma) +
         1.0 / (d * d * in.tau * in.tau) + 1.0 / (in.gamma * in.gamma);
  return 4.0 / s;
}

double check_half_identity(const Orientation& j) {
  if (j.dimension() != 2)
    throw UnsupportedModelError("check_half_identity: 2D only");
  const int m = j.sensor_count();
  const Mat jtj = j.j().transposed() * j.j();
  Mat dev = jtj;
  dev(0, 0) -= 0.5 * m;
  dev(1, 1) -= 0.5 * m;
  return dev.frobenius_norm();
}

BruteForceResult brute_force_design(const DesignProblem& problem,
                                    double resolution_deg) {
  problem.validate();
  if (problem.n != 2)
    throw UnsupportedModelError("brute_force_design: 2D only");
  if (problem.m > 3)
    throw InvalidInputError(
        "brute_force_design: refused for m > 3 (grid grows as T^m)");
  if (resolution_deg < 0.5)
    throw InvalidInputError(
        "brute_force_design: resolution below 0.5 degrees refused");

  const InformationWeights w = information_weights(problem);
  const SymMatrix& r1 = w.r1;
  const SymMatrix& r2 = *w.r2;
  const int m = problem.m;
  const Criterion crit = problem.criterion;

  const int t = std::max(3, static_cast<int>(std::lround(360.0 / resolution_deg)));
  std::vector<double> cs(t), sn(t);
  for (int i = 0; i < t; ++i) {
    cs[i] = std::cos(2.0 * kPi * i / t);
    sn[i] = std::sin(2.0 * kPi * i / t);
  }

  // F = G1 + U^T G2 U with Gb = sum_ik Rb_ik j_i j_k^T, so
  // F11 = G1_11 + G2_22, F12 = G1_12 - G2_12, F22 = G1_22 + G2_11.
  std::vector<GridBest> slices(t);

  if (m == 2) {
    parallel_for(0, t, [&](int64_t i1) {
      GridBest best;
      const double c1 = cs[i1], s1 = sn[i1];
      for (int i2 = 0; i2 < t; ++i2) {
        const double c2 = cs[i2], s2 = sn[i2];
        const double g1_11 = r1(0, 0) * c1 * c1 + 2 * r1(0, 1) * c1 * c2 + r1(1, 1) * c2 * c2;
        const double g1_22 = r1(0, 0) * s1 * s1 + 2 * r1(0, 1) * s1 * s2 + r1(1, 1) * s2 * s2;
        const double g1_12 = r1(0, 0) * c1 * s1 + r1(0, 1) * (c1 * s2 + c2 * s1) + r1(1, 1) * c2 * s2;
        const double g2_11 = r2(0, 0) * c1 * c1 + 2 * r2(0, 1) * c1 * c2 + r2(1, 1) * c2 * c2;
        const double g2_22 = r2(0, 0) * s1 * s1 + 2 * r2(0, 1) * s1 * s2 + r2(1, 1) * s2 * s2;
        const double g2_12 = r2(0, 0) * c1 * s1 + r2(0, 1) * (c1 * s2 + c2 * s1) + r2(1, 1) * c2 * s2;
        const double v = criterion_2x2(g1_11 + g2_22, g1_12 - g2_12,
                                       g1_22 + g2_11, crit);
        take_better(best, v, static_cast<long>(i1) * t + i2);
      }
      slices[i1] = best;
    });
  } else {
    parallel_for(0, t, [&](int64_t i1) {
      GridBest best;
      const double c1 = cs[i1], s1 = sn[i1];
      for (int i2 = 0; i2 < t; ++i2) {
        const double c2 = cs[i2], s2 = sn[i2];
        // Pair partials over sensors {1,2} plus the coupling coefficients
        // that multiply (c3, s3) in the inner loop.
        double b11[2], b22[2], b12[2], ac[2], as[2], r33[2];
        for (int b = 0; b < 2; ++b) {
          const SymMatrix& r = b == 0 ? r1 : r2;
          b11[b] = r(0, 0) * c1 * c1 + 2 * r(0, 1) * c1 * c2 + r(1, 1) * c2 * c2;
          b22[b] = r(0, 0) * s1 * s1 + 2 * r(0, 1) * s1 * s2 + r(1, 1) * s2 * s2;
          b12[b] = r(0, 0) * c1 * s1 + r(0, 1) * (c1 * s2 + c2 * s1) + r(1, 1) * c2 * s2;
          ac[b] = r(0, 2) * c1 + r(1, 2) * c2;
          as[b] = r(0, 2) * s1 + r(1, 2) * s2;
          r33[b] = r(2, 2);
        }
        const long base_idx = (static_cast<long>(i1) * t + i2) * t;
        for (int i3 = 0; i3 < t; ++i3) {
          const double c3 = cs[i3], s3 = sn[i3];
          const double g1_11 = b11[0] + 2 * ac[0] * c3 + r33[0] * c3 * c3;
          const double g1_22 = b22[0] + 2 * as[0] * s3 + r33[0] * s3 * s3;
          const double g1_12 = b12[0] + ac[0] * s3 + as[0] * c3 + r33[0] * c3 * s3;
          const double g2_11 = b11[1] + 2 * ac[1] * c3 + r33[1] * c3 * c3;
          const double g2_22 = b22[1] + 2 * as[1] * s3 + r33[1] * s3 * s3;
          const double g2_12 = b12[1] + ac[1] * s3 + as[1] * c3 + r33[1] * c3 * s3;
          const double v = criterion_2x2(g1_11 + g2_22, g1_12 - g2_12,
                                         g1_22 + g2_11, crit);
          take_better(best, v, base_idx + i3);
        }
      }
      slices[i1] = best;
    });
  }

  GridBest best;
  for (int i = 0; i < t; ++i) take_better(best, slices[i].value, slices[i].idx);
  if (best.idx < 0)
    throw Error("brute_force_design: criterion infinite on the whole grid");

  Mat j(m, 2);
  long idx = best.idx;
  for (int i = m - 1; i >= 0; --i) {
    const int ai = static_cast<int>(idx % t);
    idx /= t;
    j(i, 0) = cs[ai];
    j(i, 1) = sn[ai];
  }
  const Orientation jo(j);
  return {jo, criterion_value(problem, jo, crit),
          360.0 / static_cast<double>(t)};
}

double measured_grid_slack(const DesignProblem& problem, double resolution_deg) {
  const BruteForceResult coarse = brute_force_design(problem, resolution_deg);
  const BruteForceResult fine = brute_force_design(problem, resolution_deg / 2.0);
  return std::fabs(coarse.value - fine.value) + 1e-9;
}

}  // namespace hybridplace
