#include "qcavity/analytic.hpp"

#include <cmath>
#include <vector>

namespace qcavity {

namespace {

const cxd kI(0.0, 1.0);

void require_analytic_domain(const ModelParams& p, double t) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidInput("analytic solution: time must be finite and >= 0");
  if (p.delta != 0.0)
    throw InvalidInput("analytic solution: requires resonance (delta = 0)");
  if (p.gamma != 0.0)
    throw InvalidInput("analytic solution: requires negligible atomic decay (gamma = 0)");
}

// Bell coefficient combinations that weight the displaced branches:
// u, z multiply |∓alpha> (outer rotated states), v, w the vacuum branch.
struct Combos {
  cxd u, v, w, z;
};
Combos combos(const AtomicPreparation& prep) {
  const auto& c = prep.c;
  return {c[0] + c[2], c[1] - c[3], c[1] + c[3], c[0] - c[2]};
}

// coef[i][j] multiplies |branch_i><branch_j| with normalized coherent
// vectors; branch 0 -> -alpha, 1 -> vacuum, 2 -> +alpha.
constexpr int kBranch[4] = {0, 1, 1, 2};

std::array<std::array<cxd, 4>, 4> block_coefficients(const AtomicPreparation& prep,
                                                     const DecoherenceProfile& d) {
  const auto [u, v, w, z] = combos(prep);
  const double a2 = std::norm(d.alpha);
  // f1 e^{|a|^2/2} and f2 e^{2|a|^2} evaluated in log space: the factors can
  // separately under/overflow at large g/k even though the products are O(1)
  const double e1 = std::exp(d.log_f1 + 0.5 * a2);
  const double e2 = std::exp(4.0 * d.log_f1 + 2.0 * a2);

  std::array<std::array<cxd, 4>, 4> coef{};
  coef[0][0] = 0.5 * std::norm(u);
  coef[0][1] = -0.5 * u * std::conj(v) * e1;
  coef[0][2] = -0.5 * u * std::conj(w) * e1;
  coef[0][3] = 0.5 * u * std::conj(z) * e2;
  coef[1][1] = 0.5 * std::norm(v);
  coef[1][2] = 0.5 * v * std::conj(w);
  coef[1][3] = -0.5 * v * std::conj(z) * e1;
  coef[2][2] = 0.5 * std::norm(w);
  coef[2][3] = -0.5 * w * std::conj(z) * e1;
  coef[3][3] = 0.5 * std::norm(z);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) coef[i][j] = std::conj(coef[j][i]);
  return coef;
}

}  // namespace

DecoherenceProfile decoherence_profile(const ModelParams& p, double t) {
  require_analytic_domain(p, t);
  const double r = p.g / p.k;
  // 1 - e^{-kt/2} via expm1 to keep small-t accuracy
  const double em = -std::expm1(-0.5 * p.k * t);
  DecoherenceProfile d;
  d.alpha = cxd(0.0, 2.0 * r * em);
  d.log_f1 = -2.0 * p.g * p.g / p.k * t + 4.0 * r * r * em;
  d.f1 = std::exp(d.log_f1);
  const double f1sq = d.f1 * d.f1;
  d.f2 = f1sq * f1sq;
  return d;
}

Eigen::MatrixXcd analytic_block(const AtomicPreparation& prep, const ModelParams& p,
                                double t, int i, int j, const FockSpace& f) {
  if (i < 0 || i > 3 || j < 0 || j > 3)
    throw InvalidInput("analytic_block: indices must be in 0..3");
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const auto coef = block_coefficients(prep, d);
  const Eigen::VectorXcd br[3] = {coherent_state(-d.alpha, f).vec,
                                  coherent_state(cxd(0.0), f).vec,
                                  coherent_state(d.alpha, f).vec};
  return coef[i][j] * (br[kBranch[i]] * br[kBranch[j]].adjoint());
}

std::array<std::array<Eigen::MatrixXcd, 4>, 4> ground_state_blocks(const ModelParams& p,
                                                                   double t,
                                                                   const FockSpace& f) {
  const auto prep = AtomicPreparation::from_label("gg");
  std::array<std::array<Eigen::MatrixXcd, 4>, 4> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = analytic_block(prep, p, t, i, j, f);
  return out;
}

TripartiteState assemble_full_state(const AtomicPreparation& prep, const ModelParams& p,
                                    double t, int n_max) {
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const FockSpace f(n_max > 0 ? n_max : p.default_n_max());
  const int n = f.n_max;
  const auto coef = block_coefficients(prep, d);
  const Eigen::VectorXcd br[3] = {coherent_state(-d.alpha, f).vec,
                                  coherent_state(cxd(0.0), f).vec,
                                  coherent_state(d.alpha, f).vec};
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (coef[i][j] == cxd(0.0)) continue;
      rho.block(i * n, j * n, n, n) =
          coef[i][j] * (br[kBranch[i]] * br[kBranch[j]].adjoint());
    }
  return {std::move(rho), n, AtomicBasis::Rotated};
}

Eigen::MatrixXcd field_reduced_analytic(const AtomicPreparation& prep,
                                        const ModelParams& p, double t,
                                        const FockSpace& f) {
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const auto [u, v, w, z] = combos(prep);
  const Eigen::VectorXcd minus = coherent_state(-d.alpha, f).vec;
  const Eigen::VectorXcd vac = coherent_state(cxd(0.0), f).vec;
  const Eigen::VectorXcd plus = coherent_state(d.alpha, f).vec;
  return 0.5 * std::norm(u) * (minus * minus.adjoint()) +
         0.5 * (std::norm(v) + std::norm(w)) * (vac * vac.adjoint()) +
         0.5 * std::norm(z) * (plus * plus.adjoint());
}

AtomicDensityMatrix atomic_reduced_analytic(const AtomicPreparation& prep,
                                            const ModelParams& p, double t) {
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const double f1 = d.f1, f2 = d.f2;
  const cxd c1 = prep.c[0], c2 = prep.c[1], c3 = prep.c[2], c4 = prep.c[3];
  Eigen::Matrix4cd m;
  m(0, 0) = ((1 + f2) * std::norm(c1) + (1 - f2) * std::norm(c3)) / 2.0;
  m(0, 1) = -kI * f1 * c1 * std::conj(c2);
  m(0, 2) = -kI * ((1 + f2) * c1 * std::conj(c3) + (1 - f2) * std::conj(c1) * c3) / 2.0;
  m(0, 3) = f1 * c1 * std::conj(c4);
  m(1, 1) = std::norm(c2);
  m(1, 2) = f1 * c2 * std::conj(c3);
  m(1, 3) = kI * c2 * std::conj(c4);
  m(2, 2) = ((1 - f2) * std::norm(c1) + (1 + f2) * std::norm(c3)) / 2.0;
  m(2, 3) = kI * f1 * c3 * std::conj(c4);
  m(3, 3) = std::norm(c4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) m(i, j) = std::conj(m(j, i));
  return {m, AtomicBasis::Magic};
}

PurityTriple purities(const AtomicPreparation& prep, const ModelParams& p, double t) {
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const auto [u, v, w, z] = combos(prep);
  const double a2 = std::norm(d.alpha);
  const double u2 = std::norm(u), v2 = std::norm(v), w2 = std::norm(w), z2 = std::norm(z);

  // whole: each block is coef * |branch_i><branch_j| with unit-norm branch
  // states, so Tr rho^2 = sum_ij |coef_ij|^2
  const double ep1 = std::exp(2.0 * d.log_f1 + a2);        // (f1 e^{|a|^2/2})^2
  const double ep2 = std::exp(8.0 * d.log_f1 + 4.0 * a2);  // (f2 e^{2|a|^2})^2
  const double whole =
      0.25 * (u2 * u2 + v2 * v2 + w2 * w2 + z2 * z2 + 2.0 * v2 * w2 +
              2.0 * ep1 * (u2 + z2) * (v2 + w2) + 2.0 * ep2 * u2 * z2);

  const double p_minus = 0.5 * u2, p_vac = 0.5 * (v2 + w2), p_plus = 0.5 * z2;
  const double ov1 = std::exp(-a2);        // |<0|±alpha>|^2
  const double ov2 = std::exp(-4.0 * a2);  // |<-alpha|alpha>|^2
  const double field = p_minus * p_minus + p_vac * p_vac + p_plus * p_plus +
                       2.0 * (p_minus + p_plus) * p_vac * ov1 +
                       2.0 * p_minus * p_plus * ov2;

  const auto rho_a = atomic_reduced_analytic(prep, p, t);
  const double atoms = rho_a.m.squaredNorm();

  return {whole, field, atoms};
}

AtomicProbabilities atomic_probabilities(const AtomicPreparation& prep,
                                         const ModelParams& p, double t) {
  const auto rho_std = atomic_reduced_analytic(prep, p, t).in_basis(AtomicBasis::Standard);
  AtomicProbabilities out;
  out.p_ee = rho_std.m(0, 0).real();
  out.p_eg = rho_std.m(1, 1).real();
  out.p_ge = rho_std.m(2, 2).real();
  out.p_gg = rho_std.m(3, 3).real();
  out.p_e = out.p_ee + out.p_eg;
  out.p_g = out.p_ge + out.p_gg;
  return out;
}

CorrelationFunctions correlation_functions(const AtomicPreparation& prep,
                                           const ModelParams& p, double t) {
  const auto pr = atomic_probabilities(prep, p, t);
  const double pe1 = pr.p_ee + pr.p_eg, pg1 = pr.p_ge + pr.p_gg;
  const double pe2 = pr.p_ee + pr.p_ge, pg2 = pr.p_eg + pr.p_gg;
  constexpr double kTiny = 1e-15;
  if (pe1 < kTiny || pe2 < kTiny || pg1 < kTiny || pg2 < kTiny)
    throw InvalidInput("correlation_functions: a single-atom marginal vanishes"
                       " (e.g. ground-state preparation at t = 0)");
  return {pr.p_ee / (pe1 * pe2), pr.p_eg / (pe1 * pg2), pr.p_gg / (pg1 * pg2)};
}

double mean_photon_analytic(const AtomicPreparation& prep, const ModelParams& p,
                            double t) {
  prep.validate();
  const auto d = decoherence_profile(p, t);
  return (std::norm(prep.c[0]) + std::norm(prep.c[2])) * std::norm(d.alpha);
}

JointOutcome joint_outcome_from_label(const std::string& label) {
  if (label == "ee") return JointOutcome::ee;
  if (label == "eg") return JointOutcome::eg;
  if (label == "ge") return JointOutcome::ge;
  if (label == "gg") return JointOutcome::gg;
  throw InvalidInput("unknown joint outcome '" + label + "'");
}

const char* joint_outcome_name(JointOutcome o) {
  switch (o) {
    case JointOutcome::ee: return "ee";
    case JointOutcome::eg: return "eg";
    case JointOutcome::ge: return "ge";
    case JointOutcome::gg: return "gg";
  }
  return "?";
}

Eigen::MatrixXcd conditional_field_state(const ModelParams& p, double t, JointOutcome o,
                                         const FockSpace& f) {
  const auto d = decoherence_profile(p, t);
  const double a2 = std::norm(d.alpha);
  const double e1 = std::exp(d.log_f1 + 0.5 * a2);
  const double e2 = std::exp(4.0 * d.log_f1 + 2.0 * a2);
  const Eigen::VectorXcd minus = coherent_state(-d.alpha, f).vec;
  const Eigen::VectorXcd vac = coherent_state(cxd(0.0), f).vec;
  const Eigen::VectorXcd plus = coherent_state(d.alpha, f).vec;

  const bool diag_outcome = (o == JointOutcome::ee || o == JointOutcome::gg);
  if (diag_outcome) {
    const double sign = (o == JointOutcome::ee) ? -1.0 : 1.0;
    const double norm = 2.0 * (3.0 + d.f2 + sign * 4.0 * d.f1);
    Eigen::MatrixXcd num =
        minus * minus.adjoint() + plus * plus.adjoint() + 4.0 * (vac * vac.adjoint()) +
        e2 * (plus * minus.adjoint() + minus * plus.adjoint()) +
        sign * 2.0 * e1 *
            (vac * minus.adjoint() + vac * plus.adjoint() + minus * vac.adjoint() +
             plus * vac.adjoint());
    return num / norm;
  }
  const double norm = 2.0 * (1.0 - d.f2);
  if (norm < 1e-15)
    throw InvalidInput("conditional_field_state: outcome has vanishing probability at t = 0");
  Eigen::MatrixXcd num = minus * minus.adjoint() + plus * plus.adjoint() -
                         e2 * (plus * minus.adjoint() + minus * plus.adjoint());
  return num / norm;
}

Eigen::VectorXcd transient_cat_state(const ModelParams& p, double t, JointOutcome o,
                                     const FockSpace& f) {
  p.validate();
  if (!(t >= 0.0)) throw InvalidInput("transient_cat_state: time must be >= 0");
  const cxd at = kI * p.g * t;  // short-time branch amplitude
  const Eigen::VectorXcd minus = coherent_state(-at, f).vec;
  const Eigen::VectorXcd vac = coherent_state(cxd(0.0), f).vec;
  const Eigen::VectorXcd plus = coherent_state(at, f).vec;
  Eigen::VectorXcd v;
  if (o == JointOutcome::ee)
    v = minus - 2.0 * vac + plus;
  else if (o == JointOutcome::gg)
    v = minus + 2.0 * vac + plus;
  else
    v = minus - plus;
  const double n = v.norm();
  if (n < 1e-12)
    throw InvalidInput("transient_cat_state: outcome has vanishing amplitude at t = 0");
  return v / n;
}

Eigen::MatrixXcd conditional_field_steady(const ModelParams& p, JointOutcome o,
                                          const FockSpace& f) {
  p.validate();
  const Eigen::VectorXcd minus = coherent_state(-p.alpha_ss(), f).vec;
  const Eigen::VectorXcd plus = coherent_state(p.alpha_ss(), f).vec;
  if (o == JointOutcome::ee || o == JointOutcome::gg) {
    const Eigen::VectorXcd vac = coherent_state(cxd(0.0), f).vec;
    return (minus * minus.adjoint() + plus * plus.adjoint() +
            4.0 * (vac * vac.adjoint())) /
           6.0;
  }
  return 0.5 * (minus * minus.adjoint() + plus * plus.adjoint());
}

double wigner_conditional(const ModelParams& p, double t, JointOutcome o, cxd beta) {
  const auto d = decoherence_profile(p, t);
  const double a = std::abs(d.alpha);
  const double x = beta.real(), y = beta.imag();
  const double b2 = std::norm(beta);
  const double common = (2.0 / M_PI) * std::exp(-2.0 * b2);
  // e^{-2a^2} cosh(4ay) and the f-weighted pieces are combined in log space
  const double branch = 0.5 * (std::exp(-2.0 * a * a + 4.0 * a * y) +
                               std::exp(-2.0 * a * a - 4.0 * a * y));
  const double inter = std::exp(4.0 * d.log_f1 + 2.0 * a * a) * std::cos(4.0 * a * x);
  if (o == JointOutcome::ee || o == JointOutcome::gg) {
    const double sign = (o == JointOutcome::ee) ? -1.0 : 1.0;
    const double cross = 0.5 * (std::exp(d.log_f1 + 2.0 * a * y) +
                                std::exp(d.log_f1 - 2.0 * a * y)) *
                         std::cos(2.0 * a * x);
    return common / (3.0 + d.f2 + sign * 4.0 * d.f1) *
           (2.0 + branch + inter + sign * 4.0 * cross);
  }
  const double den = 1.0 - d.f2;
  if (den < 1e-15)
    throw InvalidInput("wigner_conditional: outcome has vanishing probability at t = 0");
  return common / den * (branch - inter);
}

cxd characteristic_chi(const AtomicPreparation& prep, const ModelParams& p, double t,
                       int i, int j, cxd beta) {
  if (i < 0 || i > 3 || j < 0 || j > 3)
    throw InvalidInput("characteristic_chi: indices must be in 0..3");
  if (i > j) return std::conj(characteristic_chi(prep, p, t, j, i, -beta));
  prep.validate();
  const auto d = decoherence_profile(p, t);
  const auto [u, v, w, z] = combos(prep);
  const cxd a = d.alpha, ac = std::conj(a), bc = std::conj(beta);
  const double hb2 = -0.5 * std::norm(beta);

  auto ex = [&](double lg, cxd arg) { return std::exp(cxd(lg + hb2, 0.0) + arg); };

  const int key = i * 4 + j;
  switch (key) {
    case 0 * 4 + 0: return 0.5 * std::norm(u) * ex(0.0, -ac * beta + a * bc);
    case 3 * 4 + 3: return 0.5 * std::norm(z) * ex(0.0, ac * beta - a * bc);
    case 0 * 4 + 1: return -0.5 * u * std::conj(v) * ex(d.log_f1, a * bc);
    case 0 * 4 + 2: return -0.5 * u * std::conj(w) * ex(d.log_f1, a * bc);
    case 0 * 4 + 3: return 0.5 * u * std::conj(z) * ex(4.0 * d.log_f1, ac * beta + a * bc);
    case 1 * 4 + 1: return 0.5 * std::norm(v) * ex(0.0, cxd(0.0));
    case 2 * 4 + 2: return 0.5 * std::norm(w) * ex(0.0, cxd(0.0));
    case 1 * 4 + 2: return 0.5 * v * std::conj(w) * ex(0.0, cxd(0.0));
    case 1 * 4 + 3: return -0.5 * v * std::conj(z) * ex(d.log_f1, ac * beta);
    case 2 * 4 + 3: return -0.5 * w * std::conj(z) * ex(d.log_f1, ac * beta);
  }
  return 0.0;  // unreachable
}

NullMeasurementResult null_measurement_bell(const AtomicPreparation& prep) {
  prep.validate();
  const double weight = std::norm(prep.c[1]) + std::norm(prep.c[3]);
  if (weight < 1e-14)
    throw InvalidInput("null_measurement_bell: preparation has no component in the"
                       " dissipation-free subspace");
  Eigen::Vector4cd c = Eigen::Vector4cd::Zero();
  c[1] = prep.c[1] / std::sqrt(weight);
  c[3] = prep.c[3] / std::sqrt(weight);
  return {AtomicPreparation{c}, weight};
}

DisentanglementRate disentanglement_rate(const ModelParams& p) {
  p.validate();
  if (p.g_over_k() >= 0.5) return {2.0 * p.g, "strong"};
  return {8.0 * p.g * p.g / p.k, "weak"};
}

TailFit fit_f2_decay_rate(const ModelParams& p, int samples) {
  p.validate();
  if (samples < 2) throw InvalidInput("fit_f2_decay_rate: need at least 2 samples");
  const double r = p.g / p.k;
  auto lnf2 = [r](double kt) {
    return 4.0 * (-2.0 * r * r * kt - 4.0 * r * r * std::expm1(-0.5 * kt));
  };
  auto cross = [&](double target_lnf2) {
    double hi = 1.0;
    while (lnf2(hi) > target_lnf2) {
      hi *= 2.0;
      if (hi > 1e9) throw NumericalGuard("fit_f2_decay_rate: crossing not bracketed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lnf2(mid) > target_lnf2 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double kt_lo = cross(std::log(0.9));
  const double kt_hi = cross(std::log(0.3));

  double st = 0.0, sy = 0.0;
  std::vector<double> ts(samples), ys(samples);
  for (int s = 0; s < samples; ++s) {
    ts[s] = kt_lo + (kt_hi - kt_lo) * s / (samples - 1);
    ys[s] = lnf2(ts[s]);
    st += ts[s];
    sy += ys[s];
  }
  st /= samples;
  sy /= samples;
  double num = 0.0, den = 0.0;
  for (int s = 0; s < samples; ++s) {
    num += (ts[s] - st) * (ys[s] - sy);
    den += (ts[s] - st) * (ts[s] - st);
  }
  return {-num / den * p.k, kt_lo, kt_hi};
}

}  // namespace qcavity
