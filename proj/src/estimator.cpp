#include "hybridplace/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hybridplace/errors.hpp"
#include "hybridplace/fim.hpp"
#include "hybridplace/parallel.hpp"

namespace hybridplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Precomputed inverse covariances for repeated NLL evaluation.
struct NllEvaluator {
  const Mat& sensors;
  const ModelConstants& constants;
  SymMatrix w_toa, w_rss, w_aoa;

  NllEvaluator(const Mat& s, const NoiseModel& noise, const ModelConstants& k)
      : sensors(s),
        constants(k),
        w_toa(inverse(noise.sigma_toa)),
        w_rss(inverse(noise.sigma_rss)),
        w_aoa(inverse(*noise.sigma_aoa)) {}

  double quad(const SymMatrix& w, const std::vector<double>& e) const {
    double s = 0.0;
    const int m = w.dim();
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < m; ++j) row += w(i, j) * e[j];
      s += e[i] * row;
    }
    return s;
  }

  double operator()(const HybridMeasurement& q, double rx, double ry) const {
    const int m = sensors.rows();
    std::vector<double> ez(m), ep(m), et(m);
    for (int i = 0; i < m; ++i) {
      const double dx = rx - sensors(i, 0);
      const double dy = ry - sensors(i, 1);
      const double d = std::hypot(dx, dy);
      if (d == 0.0) return kInf;
      ez[i] = q.z[i] - d;
      ep[i] = q.p[i] - constants.eta * std::log(d);
      et[i] = wrap_angle(q.theta[i] - std::atan2(dy, dx));
    }
    return 0.5 * (quad(w_toa, ez) + quad(w_rss, ep) + quad(w_aoa, et));
  }
};

}  // namespace

void GridSpec::validate() const {
  if (center.size() != 2) throw InvalidInputError("GridSpec: center must be 2D");
  if (!(half_width > 0.0)) throw InvalidInputError("GridSpec: half-width must be > 0");
  if (resolution < 3) throw InvalidInputError("GridSpec: resolution must be >= 3");
}

GridSpec GridSpec::default_for(const TargetSensorConfig& placement) {
  placement.validate();
  if (placement.dimension() != 2)
    throw UnsupportedModelError("GridSpec: the estimator works in 2D only");
  GridSpec g;
  g.center = {0.0, 0.0};
  const int m = placement.sensor_count();
  for (int i = 0; i < m; ++i) {
    g.center[0] += placement.sensors(i, 0) / m;
    g.center[1] += placement.sensors(i, 1) / m;
  }
  double dmax = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dx = placement.target[0] - placement.sensors(i, 0);
    const double dy = placement.target[1] - placement.sensors(i, 1);
    dmax = std::max(dmax, std::hypot(dx, dy));
  }
  g.half_width = 1.5 * dmax;
  g.resolution = 201;
  return g;
}

double neg_log_likelihood(const HybridMeasurement& q,
                          const std::vector<double>& candidate,
                          const Mat& sensors, const NoiseModel& noise,
                          const ModelConstants& k) {
  if (candidate.size() != 2 || sensors.cols() != 2)
    throw UnsupportedModelError("neg_log_likelihood: 2D only");
  if (!noise.sigma_aoa.has_value())
    throw InvalidInputError("neg_log_likelihood: AOA covariance required");
  const NllEvaluator eval(sensors, noise, k);
  return eval(q, candidate[0], candidate[1]);
}

namespace {

EstimateResult mle_estimate_with(const HybridMeasurement& q, const Mat& sensors,
                                 const NllEvaluator& eval,
                                 const ModelConstants& k, const GridSpec& grid) {
  const int m = sensors.rows();
  const int res = grid.resolution;

  double best = kInf;
  int best_idx = -1;
  for (int iy = 0; iy < res; ++iy) {
    const double y = grid.center[1] + grid.half_width * (2.0 * iy / (res - 1) - 1.0);
    for (int ix = 0; ix < res; ++ix) {
      const double x =
          grid.center[0] + grid.half_width * (2.0 * ix / (res - 1) - 1.0);
      const double v = eval(q, x, y);
      const int idx = iy * res + ix;
      if (v < best || (v == best && best_idx < 0)) {
        best = v;
        best_idx = idx;
      }
    }
  }
  if (best_idx < 0 || best == kInf)
    throw EstimationFailedError("mle_estimate: likelihood infinite on the whole grid");

  EstimateResult out;
  const int iy = best_idx / res, ix = best_idx % res;
  out.grid_argmin = {
      grid.center[0] + grid.half_width * (2.0 * ix / (res - 1) - 1.0),
      grid.center[1] + grid.half_width * (2.0 * iy / (res - 1) - 1.0)};
  out.r_hat = out.grid_argmin;
  out.nll = best;

  // One Gauss-Newton step on the weighted residuals.
  const double rx = out.grid_argmin[0], ry = out.grid_argmin[1];
  std::vector<double> ez(m), ep(m), et(m);
  Mat g_toa(m, 2), g_rss(m, 2), g_aoa(m, 2);
  for (int i = 0; i < m; ++i) {
    const double dx = rx - sensors(i, 0);
    const double dy = ry - sensors(i, 1);
    const double d = std::hypot(dx, dy);
    if (d == 0.0) return out;  // grid argmin on a sensor: keep it
    const double jx = dx / d, jy = dy / d;
    ez[i] = q.z[i] - d;
    ep[i] = q.p[i] - k.eta * std::log(d);
    et[i] = wrap_angle(q.theta[i] - std::atan2(dy, dx));
    g_toa(i, 0) = jx;
    g_toa(i, 1) = jy;
    g_rss(i, 0) = k.eta * jx / d;
    g_rss(i, 1) = k.eta * jy / d;
    // d theta / d r = (U^T j) / d.
    g_aoa(i, 0) = -jy / d;
    g_aoa(i, 1) = jx / d;
  }

  Mat nmat(2, 2);
  std::vector<double> rhs(2, 0.0);
  const SymMatrix* ws[3] = {&eval.w_toa, &eval.w_rss, &eval.w_aoa};
  const Mat* gs[3] = {&g_toa, &g_rss, &g_aoa};
  const std::vector<double>* es[3] = {&ez, &ep, &et};
  for (int b = 0; b < 3; ++b) {
    const Mat wg = ws[b]->mat() * (*gs[b]);       // m x 2
    const Mat gtwg = gs[b]->transposed() * wg;    // 2 x 2
    nmat = nmat + gtwg;
    for (int c = 0; c < 2; ++c) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += wg(i, c) * (*es[b])[i];
      rhs[c] += s;
    }
  }
  const double det = nmat(0, 0) * nmat(1, 1) - nmat(0, 1) * nmat(1, 0);
  if (det == 0.0 || !std::isfinite(det)) return out;  // no usable step
  const double sx = (nmat(1, 1) * rhs[0] - nmat(0, 1) * rhs[1]) / det;
  const double sy = (-nmat(1, 0) * rhs[0] + nmat(0, 0) * rhs[1]) / det;
  out.gn_step_norm = std::hypot(sx, sy);

  const double cand_x = rx + sx, cand_y = ry + sy;
  const double cand_nll = eval(q, cand_x, cand_y);
  if (cand_nll <= out.nll) {
    out.r_hat = {cand_x, cand_y};
    out.nll = cand_nll;
    out.gn_accepted = true;
  }
  return out;
}

}  // namespace

EstimateResult mle_estimate(const HybridMeasurement& q, const Mat& sensors,
                            const NoiseModel& noise, const ModelConstants& k,
                            const GridSpec& grid) {
  grid.validate();
  if (sensors.cols() != 2)
    throw UnsupportedModelError("mle_estimate: 2D only");
  if (!noise.sigma_aoa.has_value())
    throw InvalidInputError("mle_estimate: AOA covariance required");
  if (static_cast<int>(q.z.size()) != sensors.rows() ||
      static_cast<int>(q.theta.size()) != sensors.rows())
    throw InvalidInputError("mle_estimate: measurement size mismatch");
  const NllEvaluator eval(sensors, noise, k);
  return mle_estimate_with(q, sensors, eval, k, grid);
}

MseReport monte_carlo_mse(const TargetSensorConfig& placement,
                          const NoiseModel& noise, const ModelConstants& k,
                          int trials, const GridSpec& grid, uint64_t seed) {
  if (trials < 1) throw InvalidInputError("monte_carlo_mse: trials must be >= 1");
  placement.validate();
  grid.validate();
  if (placement.dimension() != 2)
    throw UnsupportedModelError("monte_carlo_mse: 2D only");
  if (!noise.sigma_aoa.has_value())
    throw InvalidInputError("monte_carlo_mse: AOA covariance required");
  // Anything a worker could throw besides a per-trial estimation failure
  // must surface here, outside the thread pool; the shared evaluator also
  // hoists the covariance inverses out of the per-trial work.
  noise.validate();
  const NllEvaluator eval(placement.sensors, noise, k);

  MseReport report;
  report.trials = trials;
  report.seed = seed;
  std::vector<double> slots(trials, 0.0);
  std::vector<char> failed(trials, 0);

  const RngStream root(seed);
  parallel_for(0, trials, [&](int64_t t) {
    RngStream rng = root.substream(static_cast<uint64_t>(t));
    try {
      const HybridMeasurement q = sample_measurement(placement, k, noise, rng);
      const EstimateResult est =
          mle_estimate_with(q, placement.sensors, eval, k, grid);
      const double ex = est.r_hat[0] - placement.target[0];
      const double ey = est.r_hat[1] - placement.target[1];
      slots[t] = ex * ex + ey * ey;
    } catch (const EstimationFailedError&) {
      failed[t] = 1;
    }
  });

  // Successful trials kept in trial order; Neumaier-compensated mean so the
  // result is deterministic under any thread count.
  double sum = 0.0, comp = 0.0;
  report.squared_errors.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    if (failed[t]) {
      ++report.failures;
      continue;
    }
    const double v = slots[t];
    report.squared_errors.push_back(v);
    const double s = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
  }
  if (report.squared_errors.empty())
    throw EstimationFailedError("monte_carlo_mse: every trial failed");
  report.mse = (sum + comp) / static_cast<double>(report.squared_errors.size());
  report.valid = report.failures <= trials / 100;
  return report;
}

}  // namespace hybridplace
