#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qcavity/analytic.hpp"
#include "qcavity/metrics.hpp"

using namespace qcavity;

namespace {

AtomicDensityMatrix werner(double p) {
  const Eigen::Vector4cd phi = AtomicPreparation::from_label("phi+").standard_coeffs();
  Eigen::Matrix4cd m = p * (phi * phi.adjoint()) +
                       (1.0 - p) * 0.25 * Eigen::Matrix4cd::Identity();
  return AtomicDensityMatrix{m, AtomicBasis::Standard};
}

AtomicDensityMatrix pure_state(const Eigen::Vector4cd& c, AtomicBasis b) {
  return AtomicDensityMatrix{c * c.adjoint(), b};
}

}  // namespace

TEST_CASE("concurrence of Werner states follows (3p - 1)/2") {
  CHECK(concurrence(werner(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(concurrence(werner(0.9)) == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(concurrence(werner(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(concurrence(werner(1.0 / 3.0)) < 1e-12);
  CHECK(concurrence(werner(0.2)) == 0.0);
}

TEST_CASE("concurrence separates Bell states from products") {
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4cd c = AtomicPreparation::bell(i).standard_coeffs();
    CHECK(concurrence(pure_state(c, AtomicBasis::Standard)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  const Eigen::Vector4cd eg = AtomicPreparation::from_label("eg").standard_coeffs();
  CHECK(concurrence(pure_state(eg, AtomicBasis::Standard)) < 1e-12);

  // a product of single-atom superpositions is still separable
  const Eigen::Vector4cd prod =
      AtomicPreparation::product(cxd(0.6, 0.0), cxd(0.0, 0.8), cxd(1.0, 0.0),
                                 cxd(0.5, -0.5))
          .standard_coeffs();
  CHECK(concurrence(pure_state(prod, AtomicBasis::Standard)) < 1e-12);
}

TEST_CASE("concurrence is independent of the basis tag") {
  const AtomicDensityMatrix w = werner(0.7);
  for (AtomicBasis b : {AtomicBasis::Rotated, AtomicBasis::Bell, AtomicBasis::Magic}) {
    CHECK(concurrence(w.in_basis(b)) ==
          doctest::Approx(concurrence(w)).epsilon(1e-12));
  }
}

TEST_CASE("entanglement of formation matches reference points") {
  CHECK(entanglement_of_formation(0.0) == 0.0);
  CHECK(entanglement_of_formation(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entanglement_of_formation(0.5) ==
        doctest::Approx(0.35457890266526988).epsilon(1e-13));

  const AtomicDensityMatrix w = werner(0.9);
  CHECK(entanglement_of_formation(w) ==
        doctest::Approx(entanglement_of_formation(concurrence(w))).epsilon(1e-13));
}

TEST_CASE("Bell-diagonal decay keeps concurrence equal to the pair coherence") {
  // the phi+ preparation decays with the two-atom factor f2
  ModelParams p;
  p.g = 1.0;
  p.k = 1.0;
  const AtomicPreparation phi = AtomicPreparation::from_label("phi+");
  const AtomicDensityMatrix rho2 = atomic_reduced_analytic(phi, p, 2.0);
  CHECK(concurrence(rho2) ==
        doctest::Approx(0.0027778693701407895).epsilon(1e-10));
  CHECK(entanglement_of_formation(rho2) ==
        doctest::Approx(3.9405263103719320e-5).epsilon(1e-8));

  p.g = 2.0;
  const AtomicDensityMatrix rho1 = atomic_reduced_analytic(phi, p, 1.0);
  CHECK(concurrence(rho1) ==
        doctest::Approx(0.0010939478758327267).epsilon(1e-10));
  CHECK(entanglement_of_formation(rho1) ==
        doctest::Approx(6.9156114129961530e-6).epsilon(1e-8));
}

TEST_CASE("purity and photon number behave on simple states") {
  CHECK(purity(0.25 * Eigen::MatrixXcd::Identity(4, 4)) ==
        doctest::Approx(0.25).epsilon(1e-14));

  Eigen::MatrixXcd therm = Eigen::MatrixXcd::Zero(5, 5);
  therm(0, 0) = 0.5;
  therm(1, 1) = 0.3;
  therm(2, 2) = 0.2;
  CHECK(mean_photon_number(therm) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(purity(therm) == doctest::Approx(0.38).epsilon(1e-14));

  const FockSpace f(40);
  const cxd alpha(0.8, -0.3);
  const Eigen::VectorXcd c = coherent_state(alpha, f).vec;
  CHECK(mean_photon_number(c * c.adjoint()) ==
        doctest::Approx(std::norm(alpha)).epsilon(1e-12));
}

TEST_CASE("fidelity and trace distance satisfy the standard identities") {
  const FockSpace f(12);
  const Eigen::VectorXcd a = coherent_state(cxd(0.5, 0.0), f).vec;
  const Eigen::VectorXcd b = coherent_state(cxd(0.0, 0.7), f).vec;
  const Eigen::MatrixXcd ra = a * a.adjoint();
  const Eigen::MatrixXcd rb = b * b.adjoint();

  // matrix square roots near rank deficiency amplify eigenvalue noise to
  // sqrt(eps), so the Uhlmann overload is only accurate to ~1e-8
  CHECK(state_fidelity(ra, ra) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(state_fidelity(ra, rb) ==
        doctest::Approx(std::norm(a.dot(b))).epsilon(1e-7));
  CHECK(state_fidelity(a, rb) ==
        doctest::Approx(std::norm(a.dot(b))).epsilon(1e-12));

  Eigen::MatrixXcd e0 = Eigen::MatrixXcd::Zero(3, 3);
  Eigen::MatrixXcd e1 = e0;
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  CHECK(trace_distance(e0, e1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trace_distance(e0, e0) < 1e-15);

  // mixing shrinks the distance
  CHECK(trace_distance(0.5 * e0 + 0.5 * e1, e1) ==
        doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("numeric Wigner values match Gaussian and Fock references") {
  const FockSpace f(24);
  Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(f.n_max, f.n_max);
  vac(0, 0) = 1.0;
  const double two_over_pi = 2.0 / M_PI;

  for (cxd beta : {cxd(0, 0), cxd(0.5, 0.0), cxd(0.3, -0.8)}) {
    CHECK(wigner_numeric(vac, beta) ==
          doctest::Approx(two_over_pi * std::exp(-2.0 * std::norm(beta)))
              .epsilon(1e-10));
  }

  // coherent state just shifts the Gaussian
  const cxd alpha(0.6, 0.4);
  const Eigen::VectorXcd c = coherent_state(alpha, f).vec;
  const Eigen::MatrixXcd rc = c * c.adjoint();
  for (cxd beta : {cxd(0.6, 0.4), cxd(0.0, 0.0), cxd(1.0, -0.2)}) {
    CHECK(wigner_numeric(rc, beta) ==
          doctest::Approx(two_over_pi * std::exp(-2.0 * std::norm(beta - alpha)))
              .epsilon(1e-9));
  }

  // one-photon state is maximally negative at the origin
  Eigen::MatrixXcd one = Eigen::MatrixXcd::Zero(f.n_max, f.n_max);
  one(1, 1) = 1.0;
  CHECK(wigner_numeric(one, cxd(0, 0)) ==
        doctest::Approx(-two_over_pi).epsilon(1e-12));

  // the quasi-probability integrates to one on a [-3,3]^2 grid
  double total = 0.0;
  const int n = 41;
  const double step = 6.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      total += wigner_numeric(one, cxd(-3.0 + i * step, -3.0 + j * step));
    }
  }
  total *= step * step;
  CHECK(std::abs(total - 1.0) < 1e-3);
}
