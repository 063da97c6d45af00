#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qcavity/analytic.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/metrics.hpp"

using namespace qcavity;

namespace {

ModelParams make_params(double g, double k) {
  ModelParams p;
  p.g = g;
  p.k = k;
  return p;
}

// exp(beta a^dag - conj(beta) a) on the truncated number basis, via the
// spectral decomposition of the Hermitian generator
Eigen::MatrixXcd displacement_op(cxd beta, const FockSpace& f) {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd(annihilation_op(f));
  const Eigen::MatrixXcd m =
      cxd(0, -1) * (beta * a.adjoint() - std::conj(beta) * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::VectorXcd phase =
      (cxd(0, 1) * es.eigenvalues().cast<cxd>()).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("decoherence profile matches high-precision reference values") {
  const ModelParams p = make_params(0.5, 1.0);
  const DecoherenceProfile d = decoherence_profile(p, 1.0);

  CHECK(d.f1 == doctest::Approx(0.8989474862671122).epsilon(1e-14));
  CHECK(d.f2 == doctest::Approx(0.6530362495945412).epsilon(1e-14));
  CHECK(d.log_f1 == doctest::Approx(-0.10653065971263342).epsilon(1e-14));
  CHECK(std::abs(d.f2 - d.f1 * d.f1 * d.f1 * d.f1) < 1e-15);
  CHECK(std::abs(d.alpha.real()) < 1e-16);
  CHECK(d.alpha.imag() == doctest::Approx(0.3934693402873666).epsilon(1e-14));
  CHECK(std::norm(d.alpha) ==
        doctest::Approx(0.15481812174617547).epsilon(1e-14));

  // the profile depends only on g/k and kt, not the absolute scale
  const DecoherenceProfile d2 = decoherence_profile(make_params(5.0, 10.0), 0.1);
  CHECK(std::abs(d2.f1 - d.f1) < 1e-15);
  CHECK(std::abs(d2.alpha - d.alpha) < 1e-15);

  const DecoherenceProfile d0 = decoherence_profile(p, 0.0);
  CHECK(d0.f1 == 1.0);
  CHECK(d0.f2 == 1.0);
  CHECK(std::abs(d0.alpha) == 0.0);
}

TEST_CASE("analytic solution rejects off-domain parameters") {
  const ModelParams p = make_params(0.5, 1.0);
  CHECK_THROWS_AS(decoherence_profile(p, -0.1), InvalidInput);

  ModelParams detuned = p;
  detuned.delta = 0.3;
  CHECK_THROWS_AS(decoherence_profile(detuned, 1.0), InvalidInput);

  ModelParams decaying = p;
  decaying.gamma = 0.1;
  CHECK_THROWS_AS(decoherence_profile(decaying, 1.0), InvalidInput);

  const FockSpace f(8);
  const AtomicPreparation gg = AtomicPreparation::from_label("gg");
  CHECK_THROWS_AS(analytic_block(gg, p, 1.0, 4, 0, f), InvalidInput);
  CHECK_THROWS_AS(characteristic_chi(gg, p, 1.0, 0, -1, cxd(0, 0)), InvalidInput);
}

TEST_CASE("the reduced atomic state at t = 0 is the preparation projector") {
  const ModelParams p = make_params(0.5, 1.0);
  for (const char* label : {"phi+", "psi-", "gg", "eg"}) {
    const AtomicPreparation prep = AtomicPreparation::from_label(label);
    const Eigen::Matrix4cd ra =
        atomic_reduced_analytic(prep, p, 0.0).in_basis(AtomicBasis::Standard).m;
    const Eigen::Vector4cd c = prep.standard_coeffs();
    CHECK((ra - c * c.adjoint()).norm() < 1e-14);
  }
}

TEST_CASE("assembled full state is consistent with its closed-form reductions") {
  const ModelParams p = make_params(0.5, 1.0);
  for (const char* label : {"gg", "phi+"}) {
    const AtomicPreparation prep = AtomicPreparation::from_label(label);
    const TripartiteState full = assemble_full_state(prep, p, 1.0);
    CHECK(full.basis == AtomicBasis::Rotated);
    CHECK(std::abs(full.rho.trace() - 1.0) < 1e-12);
    CHECK_NOTHROW(full.validate_positive());

    const FockSpace f(full.n_max);
    CHECK((full.field_reduced() - field_reduced_analytic(prep, p, 1.0, f)).norm() <
          1e-12);

    const Eigen::Matrix4cd ra_trace =
        AtomicDensityMatrix{full.atomic_reduced(), AtomicBasis::Rotated}
            .in_basis(AtomicBasis::Standard)
            .m;
    const Eigen::Matrix4cd ra_closed =
        atomic_reduced_analytic(prep, p, 1.0).in_basis(AtomicBasis::Standard).m;
    CHECK((ra_trace - ra_closed).norm() < 1e-12);

    const PurityTriple mu = purities(prep, p, 1.0);
    CHECK(purity(full.rho) == doctest::Approx(mu.whole).epsilon(1e-11));
    CHECK(purity(full.field_reduced()) == doctest::Approx(mu.field).epsilon(1e-11));
    CHECK(purity(full.atomic_reduced()) == doctest::Approx(mu.atoms).epsilon(1e-11));
  }
}

TEST_CASE("purities match reference values and the late-time plateau") {
  const ModelParams p = make_params(0.5, 1.0);
  const AtomicPreparation gg = AtomicPreparation::from_label("gg");

  const PurityTriple mu = purities(gg, p, 1.0);
  CHECK(mu.whole == doctest::Approx(0.9457321319003946).epsilon(1e-13));
  CHECK(mu.atoms == doctest::Approx(0.8323603344435430).epsilon(1e-13));

  const PurityTriple late = purities(gg, p, 60.0);
  CHECK(late.whole == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(late.atoms == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(late.field == doctest::Approx(0.5612291754468129).epsilon(1e-13));

  const PurityTriple start = purities(gg, p, 0.0);
  CHECK(start.whole == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("measurement probabilities and correlations match reference values") {
  const ModelParams p = make_params(0.5, 1.0);
  const AtomicPreparation gg = AtomicPreparation::from_label("gg");

  const AtomicProbabilities ap = atomic_probabilities(gg, p, 1.0);
  CHECK(ap.p_e == doctest::Approx(0.05052625686644389).epsilon(1e-13));
  CHECK(ap.p_e + ap.p_g == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ap.p_ee + ap.p_eg + ap.p_ge + ap.p_gg ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ap.p_eg == doctest::Approx(ap.p_ge).epsilon(1e-13));

  const CorrelationFunctions cf = correlation_functions(gg, p, 1.0);
  CHECK(cf.c_ee == doctest::Approx(2.8030007778000922).epsilon(1e-12));
  CHECK(cf.c_eg == doctest::Approx(0.9040532915329800).epsilon(1e-12));
  CHECK(cf.c_gg == doctest::Approx(1.0051058052658677).epsilon(1e-12));

  // at t = 0 both atoms are surely ground, so the excited marginal vanishes
  CHECK_THROWS_AS(correlation_functions(gg, p, 0.0), InvalidInput);

  CHECK(mean_photon_analytic(gg, p, 1.0) ==
        doctest::Approx(0.077409060873087735).epsilon(1e-13));
  CHECK(mean_photon_analytic(gg, p, 60.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("characteristic kernels agree with numerically displaced blocks") {
  const ModelParams p = make_params(0.5, 1.0);
  const FockSpace f(24);
  const Eigen::MatrixXcd dsp = displacement_op(cxd(0.7, -0.3), f);
  const AtomicPreparation prep = AtomicPreparation::from_label("phi+");

  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const cxd closed = characteristic_chi(prep, p, 1.0, i, j, cxd(0.7, -0.3));
      const cxd numeric = (analytic_block(prep, p, 1.0, i, j, f) * dsp).trace();
      CHECK(std::abs(closed - numeric) < 1e-12);
      // conjugation symmetry of the kernel family
      const cxd mirrored =
          std::conj(characteristic_chi(prep, p, 1.0, j, i, cxd(-0.7, 0.3)));
      CHECK(std::abs(closed - mirrored) < 1e-14);
    }
  }
}

TEST_CASE("conditional field states are physical and reach the steady limit") {
  const ModelParams p = make_params(0.5, 1.0);
  const FockSpace f(20);

  for (JointOutcome o : {JointOutcome::ee, JointOutcome::eg, JointOutcome::gg}) {
    const Eigen::MatrixXcd rho = conditional_field_state(p, 1.0, o, f);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  CHECK_THROWS_AS(conditional_field_state(p, 0.0, JointOutcome::eg, f),
                  InvalidInput);

  const Eigen::MatrixXcd late =
      conditional_field_state(p, 60.0, JointOutcome::gg, f);
  const Eigen::MatrixXcd steady = conditional_field_steady(p, JointOutcome::gg, f);
  CHECK(trace_distance(late, steady) < 1e-10);
}

TEST_CASE("closed-form conditional Wigner matches the displaced-parity value") {
  const ModelParams p = make_params(0.5, 1.0);
  const FockSpace f(20);
  const cxd betas[] = {cxd(0, 0), cxd(0.3, 0.2), cxd(0, -0.5), cxd(1.0, 1.0)};

  for (double kt : {0.5, 5.0}) {
    for (JointOutcome o : {JointOutcome::ee, JointOutcome::eg, JointOutcome::gg}) {
      const Eigen::MatrixXcd rho = conditional_field_state(p, kt, o, f);
      for (cxd beta : betas) {
        CHECK(std::abs(wigner_conditional(p, kt, o, beta) -
                       wigner_numeric(rho, beta)) < 1e-8);
      }
    }
  }
}

TEST_CASE("short-time conditional states approach ideal cat superpositions") {
  // fidelity deficit scales like kt (gt)^2 at fixed gt, so shrink kt while
  // keeping the cat amplitude gt = 0.8
  const ModelParams fine = make_params(800.0, 1.0);
  const ModelParams coarse = make_params(80.0, 1.0);
  const FockSpace f(24);

  for (JointOutcome o : {JointOutcome::ee, JointOutcome::eg, JointOutcome::gg}) {
    const Eigen::VectorXcd cat = transient_cat_state(fine, 0.001, o, f);
    CHECK(cat.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double f_fine =
        state_fidelity(cat, conditional_field_state(fine, 0.001, o, f));
    CHECK(f_fine > 0.999);

    const double f_coarse =
        state_fidelity(transient_cat_state(coarse, 0.01, o, f),
                       conditional_field_state(coarse, 0.01, o, f));
    CHECK(f_fine > f_coarse);  // converges toward the limit as kt shrinks
  }

  CHECK_THROWS_AS(transient_cat_state(fine, 0.0, JointOutcome::eg, f),
                  InvalidInput);
}

TEST_CASE("outcome labels round trip") {
  CHECK(joint_outcome_from_label("ee") == JointOutcome::ee);
  CHECK(joint_outcome_from_label("eg") == JointOutcome::eg);
  CHECK(joint_outcome_from_label("ge") == JointOutcome::ge);
  CHECK(joint_outcome_from_label("gg") == JointOutcome::gg);
  CHECK(std::string(joint_outcome_name(JointOutcome::eg)) == "eg");
  CHECK_THROWS_AS(joint_outcome_from_label("xx"), InvalidInput);
}

TEST_CASE("null photodetection heralds the dissipation-free component") {
  const NullMeasurementResult kept =
      null_measurement_bell(AtomicPreparation::from_label("phi-"));
  CHECK(kept.weight == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(kept.prep.c(1)) == doctest::Approx(1.0).epsilon(1e-14));

  AtomicPreparation half;
  half.c << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);  // phi+ & psi-
  const NullMeasurementResult r = null_measurement_bell(half);
  CHECK(r.weight == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(r.prep.c(3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(r.prep.c(0)) < 1e-14);

  CHECK_THROWS_AS(null_measurement_bell(AtomicPreparation::from_label("phi+")),
                  InvalidInput);
}

TEST_CASE("disentanglement rate switches regime at g/k = 1/2") {
  const DisentanglementRate strong = disentanglement_rate(make_params(2.0, 1.0));
  CHECK(strong.rate == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::string(strong.regime) == "strong");

  const DisentanglementRate edge = disentanglement_rate(make_params(0.5, 1.0));
  CHECK(edge.rate == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::string(edge.regime) == "strong");

  const DisentanglementRate weak = disentanglement_rate(make_params(0.05, 1.0));
  CHECK(weak.rate == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(std::string(weak.regime) == "weak");
}

TEST_CASE("fitted early decay rate of f2 matches reference values") {
  const TailFit strong = fit_f2_decay_rate(make_params(2.0, 1.0));
  CHECK(strong.rate == doctest::Approx(3.8637895973).epsilon(1e-6));
  CHECK(strong.kt_lo == doctest::Approx(0.11586898).epsilon(1e-5));
  CHECK(strong.kt_hi == doctest::Approx(0.40089634).epsilon(1e-5));

  const TailFit weak = fit_f2_decay_rate(make_params(0.05, 1.0));
  CHECK(weak.rate == doctest::Approx(0.0199957642).epsilon(1e-6));
  CHECK(weak.kt_lo == doctest::Approx(7.2137528).epsilon(1e-5));
  CHECK(weak.kt_hi == doctest::Approx(62.19864).epsilon(1e-5));

  CHECK_THROWS_AS(fit_f2_decay_rate(make_params(0.5, 1.0), 1), InvalidInput);
}
