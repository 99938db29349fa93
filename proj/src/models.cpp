#include "hybridplace/models.hpp"

#include <cmath>
#include <string>

#include "hybridplace/errors.hpp"

namespace hybridplace {

namespace {
const double kLn10 = std::log(10.0);

bool is_zero_matrix(const SymMatrix& s) { return s.frobenius_norm() == 0.0; }

void check_covariance(const SymMatrix& s, const char* name) {
  if (is_zero_matrix(s)) return;  // noiseless limit
  if (smallest_eigenvalue(s) <= 0.0)
    throw NotPositiveDefiniteError(
        std::string(name) + " covariance is not positive definite", -1);
}

// Cholesky factor, with the all-zero matrix mapping to L = 0.
Mat noise_factor(const SymMatrix& s) {
  if (is_zero_matrix(s)) return Mat(s.dim(), s.dim());
  return cholesky(s);
}

std::vector<double> correlated_draw(const Mat& l, RngStream& rng) {
  const int m = l.rows();
  std::vector<double> g(m);
  for (int i = 0; i < m; ++i) g[i] = rng.normal();
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int k = 0; k <= i; ++k) s += l(i, k) * g[k];
    out[i] = s;
  }
  return out;
}

}  // namespace

ModelConstants ModelConstants::from_alpha(double alpha, double c, double p0) {
  ModelConstants k;
  k.c = c;
  k.p0 = p0;
  k.alpha = alpha;
  k.eta = -10.0 * alpha / kLn10;
  k.validate();
  return k;
}

ModelConstants ModelConstants::from_eta(double eta, double c, double p0) {
  ModelConstants k;
  k.c = c;
  k.p0 = p0;
  k.eta = eta;
  k.alpha = -eta * kLn10 / 10.0;
  k.validate();
  return k;
}

void ModelConstants::validate() const {
  if (!(alpha > 0.0)) throw InvalidInputError("ModelConstants: alpha must be > 0");
  if (!(c > 0.0)) throw InvalidInputError("ModelConstants: c must be > 0");
  if (std::fabs(eta - (-10.0 * alpha / kLn10)) >
      1e-12 * std::max(1.0, std::fabs(eta)))
    throw InvalidInputError("ModelConstants: eta != -10*alpha/ln(10)");
}

void NoiseModel::validate() const {
  const int m = sigma_toa.dim();
  if (sigma_rss.dim() != m ||
      (sigma_aoa.has_value() && sigma_aoa->dim() != m))
    throw InvalidInputError("NoiseModel: covariance dimensions differ");
  check_covariance(sigma_toa, "TOA");
  check_covariance(sigma_rss, "RSS");
  if (sigma_aoa.has_value()) check_covariance(*sigma_aoa, "AOA");
}

std::vector<double> HybridMeasurement::stacked() const {
  std::vector<double> q;
  q.reserve(z.size() + p.size() + theta.size());
  q.insert(q.end(), z.begin(), z.end());
  q.insert(q.end(), p.begin(), p.end());
  q.insert(q.end(), theta.begin(), theta.end());
  return q;
}

HybridMeasurement hybrid_mean(const TargetSensorConfig& cfg,
                              const ModelConstants& k) {
  cfg.validate();
  k.validate();
  const int m = cfg.sensor_count();
  const int n = cfg.dimension();
  HybridMeasurement q;
  q.z.resize(m);
  q.p.resize(m);
  if (n == 2) q.theta.resize(m);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) {
      const double diff = cfg.target[d] - cfg.sensors(i, d);
      s += diff * diff;
    }
    const double di = std::sqrt(s);
    q.z[i] = di;
    q.p[i] = k.eta * std::log(di);
    if (n == 2)
      q.theta[i] = wrap_angle(std::atan2(cfg.target[1] - cfg.sensors(i, 1),
                                         cfg.target[0] - cfg.sensors(i, 0)));
  }
  return q;
}

HybridMeasurement sample_measurement(const TargetSensorConfig& cfg,
                                     const ModelConstants& k,
                                     const NoiseModel& noise, RngStream& rng) {
  noise.validate();
  if (noise.sensor_count() != cfg.sensor_count())
    throw InvalidInputError("sample_measurement: noise dimension mismatch");
  if (cfg.dimension() == 2 && !noise.sigma_aoa.has_value())
    throw InvalidInputError("sample_measurement: 2D model requires an AOA covariance");

  HybridMeasurement q = hybrid_mean(cfg, k);
  const int m = cfg.sensor_count();

  const Mat l_toa = noise_factor(noise.sigma_toa);
  const Mat l_rss = noise_factor(noise.sigma_rss);
  const std::vector<double> e_toa = correlated_draw(l_toa, rng);
  const std::vector<double> e_rss = correlated_draw(l_rss, rng);
  for (int i = 0; i < m; ++i) {
    q.z[i] += e_toa[i];
    q.p[i] += e_rss[i];
  }
  if (cfg.dimension() == 2) {
    const Mat l_aoa = noise_factor(*noise.sigma_aoa);
    const std::vector<double> e_aoa = correlated_draw(l_aoa, rng);
    for (int i = 0; i < m; ++i) q.theta[i] = wrap_angle(q.theta[i] + e_aoa[i]);
  }
  return q;
}

SymMatrix correlated_covariance_from_uniform(const Mat& g, double floor) {
  if (!(floor > 0.0))
    throw InvalidInputError("correlated covariance: floor must be > 0");
  const int m = g.rows();
  Mat s = g * g.transposed() * (1.0 / m);
  for (int i = 0; i < m; ++i) s(i, i) += floor;
  return SymMatrix::symmetrize(s);
}

SymMatrix random_correlated_covariance(int m, double floor, uint64_t seed) {
  if (m < 2) throw InvalidInputError("random_correlated_covariance: m must be >= 2");
  RngStream rng(seed);
  Mat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.uniform01();
  return correlated_covariance_from_uniform(g, floor);
}

}  // namespace hybridplace
