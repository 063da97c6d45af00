#include "qcavity/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qcavity/errors.hpp"

namespace qcavity {

double concurrence(const AtomicDensityMatrix& rho) {
  const Eigen::Matrix4cd m = rho.in_basis(AtomicBasis::Magic).m;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalGuard("concurrence: eigensolver failed");

  Eigen::Matrix4cd x = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) {
    const double mu = std::max(0.0, es.eigenvalues()[i]);
    x.col(i) = std::sqrt(mu) * es.eigenvectors().col(i);
  }
  const Eigen::Matrix4cd tau = x.transpose() * x;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
  const auto& s = svd.singularValues();
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

double entanglement_of_formation(double concurrence_value) {
  const double c = std::clamp(concurrence_value, 0.0, 1.0);
  const double p = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c)));
  auto plogp = [](double q) { return q > 0.0 ? q * std::log2(q) : 0.0; };
  return -plogp(p) - plogp(1.0 - p);
}

double entanglement_of_formation(const AtomicDensityMatrix& rho) {
  return entanglement_of_formation(concurrence(rho));
}

double purity(const Eigen::MatrixXcd& rho) { return rho.squaredNorm(); }

double mean_photon_number(const Eigen::MatrixXcd& rho_field) {
  double n = 0.0;
  for (int i = 1; i < rho_field.rows(); ++i) n += i * rho_field(i, i).real();
  return n;
}

double state_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw InvalidInput("state_fidelity: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a);
  if (ea.info() != Eigen::Success)
    throw NumericalGuard("state_fidelity: eigensolver failed");
  Eigen::VectorXd sq = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd sqrt_a =
      ea.eigenvectors() * sq.asDiagonal() * ea.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(sqrt_a * b * sqrt_a);
  if (em.info() != Eigen::Success)
    throw NumericalGuard("state_fidelity: eigensolver failed");
  const double root_sum = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return root_sum * root_sum;
}

double state_fidelity(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho) {
  if (psi.size() != rho.rows() || rho.rows() != rho.cols())
    throw InvalidInput("state_fidelity: dimension mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b);
  if (es.info() != Eigen::Success)
    throw NumericalGuard("trace_distance: eigensolver failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double wigner_numeric(const Eigen::MatrixXcd& rho_field, cxd beta) {
  const int n = static_cast<int>(rho_field.rows());
  if (n < 2 || rho_field.cols() != n)
    throw InvalidInput("wigner_numeric: need a square field matrix, dim >= 2");
  const double ab = std::abs(beta);
  const int pad = static_cast<int>(std::ceil(ab * ab + 6.0 * ab + 10.0));
  const int ne = n + pad;
  const FockSpace f(ne);

  Eigen::MatrixXcd rho_pad = Eigen::MatrixXcd::Zero(ne, ne);
  rho_pad.topLeftCorner(n, n) = rho_field;

  // D(beta) = exp(beta a+ - conj(beta) a); i*(that generator) is Hermitian,
  // so the exponential comes from a self-adjoint eigendecomposition
  Eigen::MatrixXcd k = cxd(0.0, 1.0) * (beta * Eigen::MatrixXcd(creation_op(f)) -
                                        std::conj(beta) * Eigen::MatrixXcd(annihilation_op(f)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
  if (es.info() != Eigen::Success)
    throw NumericalGuard("wigner_numeric: eigensolver failed");
  Eigen::VectorXcd phase(ne);
  for (int i = 0; i < ne; ++i)
    phase[i] = std::exp(cxd(0.0, -es.eigenvalues()[i]));
  const Eigen::MatrixXcd d =
      es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();

  const Eigen::MatrixXcd displaced = d.adjoint() * rho_pad * d;
  double w = 0.0;
  for (int i = 0; i < ne; ++i)
    w += (i % 2 == 0 ? 1.0 : -1.0) * displaced(i, i).real();
  return 2.0 / M_PI * w;
}

}  // namespace qcavity
