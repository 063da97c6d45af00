#include "qcavity/state.hpp"

#include <cmath>

namespace qcavity {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
const cxd kI(0.0, 1.0);
}

const char* basis_name(AtomicBasis b) {
  switch (b) {
    case AtomicBasis::Standard: return "standard";
    case AtomicBasis::Rotated: return "rotated";
    case AtomicBasis::Bell: return "bell";
    case AtomicBasis::Magic: return "magic";
  }
  return "?";
}

Eigen::Matrix4cd basis_in_standard(AtomicBasis b) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  switch (b) {
    case AtomicBasis::Standard:
      u.setIdentity();
      break;
    case AtomicBasis::Rotated: {
      // |±> = (|g> ± |e>)/sqrt2, columns {++, +-, -+, --} over rows {ee,eg,ge,gg}
      Eigen::Matrix2cd s;  // rows {e,g}, cols {+,-}
      s << kInvSqrt2, -kInvSqrt2, kInvSqrt2, kInvSqrt2;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int a = 0; a < 2; ++a)
            for (int bnd = 0; bnd < 2; ++bnd)
              u(a * 2 + bnd, i * 2 + j) = s(a, i) * s(bnd, j);
      break;
    }
    case AtomicBasis::Bell:
      u(0, 0) = kInvSqrt2; u(3, 0) = kInvSqrt2;    // Phi+
      u(0, 1) = kInvSqrt2; u(3, 1) = -kInvSqrt2;   // Phi-
      u(1, 2) = kInvSqrt2; u(2, 2) = kInvSqrt2;    // Psi+
      u(1, 3) = kInvSqrt2; u(2, 3) = -kInvSqrt2;   // Psi-
      break;
    case AtomicBasis::Magic: {
      Eigen::Matrix4cd bell = basis_in_standard(AtomicBasis::Bell);
      u = bell;
      u.col(1) *= -kI;
      u.col(2) *= -kI;
      break;
    }
  }
  return u;
}

Eigen::Matrix4cd basis_change(AtomicBasis from, AtomicBasis to) {
  if (from == to) return Eigen::Matrix4cd::Identity();
  return basis_in_standard(to).adjoint() * basis_in_standard(from);
}

void AtomicPreparation::validate() const {
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()))
      throw InvalidInput("AtomicPreparation: non-finite coefficient");
  if (std::abs(c.squaredNorm() - 1.0) > 1e-10)
    throw InvalidInput("AtomicPreparation: coefficients must have unit norm");
}

Eigen::Vector4cd AtomicPreparation::standard_coeffs() const {
  return basis_in_standard(AtomicBasis::Bell) * c;
}

Eigen::Vector4cd AtomicPreparation::rotated_coeffs() const {
  return basis_change(AtomicBasis::Bell, AtomicBasis::Rotated) * c;
}

AtomicPreparation AtomicPreparation::bell(int i) {
  if (i < 0 || i > 3) throw InvalidInput("AtomicPreparation::bell: index out of range");
  Eigen::Vector4cd c = Eigen::Vector4cd::Zero();
  c[i] = 1.0;
  return {c};
}

AtomicPreparation AtomicPreparation::product(cxd a1, cxd b1, cxd a2, cxd b2) {
  const double n1 = std::sqrt(std::norm(a1) + std::norm(b1));
  const double n2 = std::sqrt(std::norm(a2) + std::norm(b2));
  if (n1 <= 0.0 || n2 <= 0.0)
    throw InvalidInput("AtomicPreparation::product: zero single-atom amplitude");
  a1 /= n1; b1 /= n1; a2 /= n2; b2 /= n2;
  Eigen::Vector4cd c;
  c << (a1 * a2 + b1 * b2) * kInvSqrt2,
       (a1 * a2 - b1 * b2) * kInvSqrt2,
       (a1 * b2 + b1 * a2) * kInvSqrt2,
       (a1 * b2 - b1 * a2) * kInvSqrt2;
  return {c};
}

AtomicPreparation AtomicPreparation::from_label(const std::string& label) {
  if (label == "phi+") return bell(0);
  if (label == "phi-") return bell(1);
  if (label == "psi+") return bell(2);
  if (label == "psi-") return bell(3);
  if (label == "ee") return product(1.0, 0.0, 1.0, 0.0);
  if (label == "eg") return product(1.0, 0.0, 0.0, 1.0);
  if (label == "ge") return product(0.0, 1.0, 1.0, 0.0);
  if (label == "gg") return product(0.0, 1.0, 0.0, 1.0);
  throw InvalidInput("unknown preparation label '" + label + "'");
}

TripartiteState::TripartiteState(Eigen::MatrixXcd m, int n, AtomicBasis b)
    : rho(std::move(m)), n_max(n), basis(b) {
  if (rho.rows() != 4 * n_max || rho.cols() != 4 * n_max)
    throw InvalidInput("TripartiteState: matrix dimension does not match 4*n_max");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw NumericalGuard("TripartiteState: Hermiticity violated by " + std::to_string(herm));
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-9)
    throw NumericalGuard("TripartiteState: trace deviates from 1 by " +
                         std::to_string(tr - 1.0));
}

void TripartiteState::validate_positive(double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol)
    throw NumericalGuard("TripartiteState: negative eigenvalue " + std::to_string(lo));
}

TripartiteState TripartiteState::in_basis(AtomicBasis b) const {
  if (b == basis) return *this;
  return {apply_atomic_unitary(rho, n_max, basis_change(basis, b)), n_max, b};
}

Eigen::Matrix4cd TripartiteState::atomic_reduced() const {
  return partial_trace_field(rho, n_max);
}

Eigen::MatrixXcd TripartiteState::field_reduced() const {
  return partial_trace_atoms(rho, n_max);
}

Eigen::MatrixXcd TripartiteState::block(int i, int j) const {
  return rho.block(i * n_max, j * n_max, n_max, n_max);
}

Eigen::Matrix4cd partial_trace_field(const Eigen::MatrixXcd& rho, int n_max) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out(i, j) = rho.block(i * n_max, j * n_max, n_max, n_max).trace();
  return out;
}

Eigen::MatrixXcd partial_trace_atoms(const Eigen::MatrixXcd& rho, int n_max) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_max, n_max);
  for (int p = 0; p < 4; ++p) out += rho.block(p * n_max, p * n_max, n_max, n_max);
  return out;
}

Eigen::MatrixXcd apply_atomic_unitary(const Eigen::MatrixXcd& rho, int n_max,
                                      const Eigen::Matrix4cd& u) {
  const int dim = 4 * n_max;
  if (rho.rows() != dim || rho.cols() != dim)
    throw InvalidInput("apply_atomic_unitary: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto dst = out.block(i * n_max, j * n_max, n_max, n_max);
      for (int kk = 0; kk < 4; ++kk) {
        if (u(i, kk) == cxd(0.0)) continue;
        for (int l = 0; l < 4; ++l) {
          const cxd w = u(i, kk) * std::conj(u(j, l));
          if (w == cxd(0.0)) continue;
          dst += w * rho.block(kk * n_max, l * n_max, n_max, n_max);
        }
      }
    }
  return out;
}

}  // namespace qcavity
