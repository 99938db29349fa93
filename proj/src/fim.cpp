#include "hybridplace/fim.hpp"

#include <cmath>
#include <string>

#include "hybridplace/errors.hpp"

namespace hybridplace {

const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::A: return "A";
    case Criterion::D: return "D";
    case Criterion::E: return "E";
  }
  return "?";
}

Criterion criterion_from_name(const std::string& s) {
  if (s == "A" || s == "a") return Criterion::A;
  if (s == "D" || s == "d") return Criterion::D;
  if (s == "E" || s == "e") return Criterion::E;
  throw InvalidInputError("unknown criterion '" + s + "' (expected A, D or E)");
}

void DesignProblem::validate() const {
  if (m < 2) throw InvalidInputError("DesignProblem: m must be >= 2");
  if (n != 2 && n != 3) throw InvalidInputError("DesignProblem: n must be 2 or 3");
  if (distances.count() != m)
    throw InvalidInputError("DesignProblem: distance count != m");
  constants.validate();
  noise.validate();
  if (noise.sensor_count() != m)
    throw InvalidInputError("DesignProblem: noise dimension != m");
  if (n == 2 && !noise.sigma_aoa.has_value())
    throw InvalidInputError("DesignProblem: 2D hybrid model requires an AOA covariance");
  if (n == 3 && noise.sigma_aoa.has_value())
    throw UnsupportedModelError(
        "DesignProblem: AOA covariance provided for n=3; 3D bearings are not "
        "part of this model (use the reduced TOA-RSS form)");
}

const Mat& rotation_u() {
  static const Mat u(2, 2, {0.0, 1.0, -1.0, 0.0});
  return u;
}

InformationWeights information_weights(const DesignProblem& p) {
  p.validate();
  const Mat d = p.distances.reciprocal_diag();
  const SymMatrix toa_inv = inverse(p.noise.sigma_toa);
  const SymMatrix rss_inv = inverse(p.noise.sigma_rss);
  const double eta2 = p.constants.eta * p.constants.eta;
  InformationWeights w;
  w.r1 = SymMatrix::symmetrize(toa_inv.mat() + d * rss_inv.mat() * d * eta2);
  if (p.n == 2) {
    const SymMatrix aoa_inv = inverse(*p.noise.sigma_aoa);
    w.r2 = SymMatrix::symmetrize(d * aoa_inv.mat() * d);
  }
  return w;
}

HybridForm HybridForm::from_problem(const DesignProblem& p, const Orientation& j) {
  if (j.sensor_count() != p.m || j.dimension() != p.n)
    throw InvalidInputError("HybridForm: orientation shape mismatch");
  InformationWeights w = information_weights(p);
  HybridForm f;
  f.j = j.j();
  f.r1 = std::move(w.r1);
  f.r2 = std::move(w.r2);
  return f;
}

Mat HybridForm::h() const {
  if (!r2.has_value()) return j;
  const int m = j.rows(), n = j.cols();
  const Mat ju = j * rotation_u();
  Mat out(2 * m, n);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) {
      out(i, k) = j(i, k);
      out(m + i, k) = ju(i, k);
    }
  return out;
}

Mat HybridForm::r_blkdiag() const {
  const int m = r1.dim();
  if (!r2.has_value()) return r1.mat();
  Mat out(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      out(i, k) = r1(i, k);
      out(m + i, m + k) = (*r2)(i, k);
    }
  return out;
}

SymMatrix HybridForm::information() const {
  Mat f = j.transposed() * r1.mat() * j;
  if (r2.has_value()) {
    const Mat& u = rotation_u();
    f = f + u.transposed() * j.transposed() * r2->mat() * j * u;
  }
  return SymMatrix::symmetrize(f);
}

SymMatrix fim_toa(const Orientation& j, const SymMatrix& sigma_toa) {
  const SymMatrix inv = inverse(sigma_toa);
  return SymMatrix::symmetrize(j.j().transposed() * inv.mat() * j.j());
}

SymMatrix fim_rss(const Orientation& j, const DistanceProfile& d, double eta,
                  const SymMatrix& sigma_rss) {
  const SymMatrix inv = inverse(sigma_rss);
  const Mat dm = d.reciprocal_diag();
  return SymMatrix::symmetrize(j.j().transposed() * dm * inv.mat() * dm * j.j() *
                               (eta * eta));
}

SymMatrix fim_aoa(const Orientation& j, const DistanceProfile& d,
                  const SymMatrix& sigma_aoa) {
  if (j.dimension() != 2)
    throw UnsupportedModelError("fim_aoa: bearings are modeled in 2D only");
  const SymMatrix inv = inverse(sigma_aoa);
  const Mat dm = d.reciprocal_diag();
  const Mat& u = rotation_u();
  return SymMatrix::symmetrize(u.transposed() * j.j().transposed() * dm *
                               inv.mat() * dm * j.j() * u);
}

FimResult hybrid_fim(const DesignProblem& p, const Orientation& j) {
  p.validate();
  if (j.sensor_count() != p.m || j.dimension() != p.n)
    throw InvalidInputError("hybrid_fim: orientation shape mismatch");

  Mat sum = fim_toa(j, p.noise.sigma_toa).mat() +
            fim_rss(j, p.distances, p.constants.eta, p.noise.sigma_rss).mat();
  if (p.n == 2)
    sum = sum + fim_aoa(j, p.distances, *p.noise.sigma_aoa).mat();
  const SymMatrix f = SymMatrix::symmetrize(sum);

  // Cross-check the compact form H^T R H against the modality sum.
  const HybridForm hf = HybridForm::from_problem(p, j);
  const SymMatrix compact = hf.information();
  const double scale = std::max(f.frobenius_norm(), 1e-300);
  if ((f.mat() - compact.mat()).frobenius_norm() > 1e-10 * scale)
    throw Error("hybrid_fim: compact-form information mismatch");

  FimResult out;
  out.f = f;
  try {
    out.crlb = inverse(f);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        std::string("hybrid_fim: singular Fisher information (unidentifiable "
                    "design): ") + e.what(),
        e.condition_estimate);
  }
  out.trace_crlb = out.crlb.trace();

  const EvdResult evd = sym_evd(f);
  double logdet = 0.0;
  for (double ev : evd.eigenvalues) {
    if (!(ev > 0.0))
      throw SingularMatrixError("hybrid_fim: non-positive FIM eigenvalue",
                                condition_estimate(f));
    logdet += std::log(ev);
  }
  out.neg_log_det_f = -logdet;
  out.max_eig_crlb = 1.0 / evd.eigenvalues.back();
  return out;
}

double criterion_value(const DesignProblem& p, const Orientation& j,
                       Criterion crit) {
  const FimResult r = hybrid_fim(p, j);
  switch (crit) {
    case Criterion::A: return r.trace_crlb;
    case Criterion::D: return r.neg_log_det_f;
    case Criterion::E: return r.max_eig_crlb;
  }
  throw InvalidInputError("criterion_value: bad criterion");
}

}  // namespace hybridplace
