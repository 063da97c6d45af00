#pragma once

#include <Eigen/Dense>

#include "qcavity/fock.hpp"
#include "qcavity/state.hpp"

namespace qcavity {

// Wootters concurrence of a two-qubit state. Computed from the singular
// values of the complex-symmetric overlap matrix tau_ij = x_i^T x_j built
// from subnormalized eigenvectors in the basis where spin flip is plain
// conjugation; this avoids the sqrt blow-up the naive rho*conj(rho)
// eigenproblem suffers for (near-)separable states.
double concurrence(const AtomicDensityMatrix& rho);

// Binary entropy of ((1 + sqrt(1 - C^2)) / 2), in bits.
double entanglement_of_formation(double concurrence_value);
double entanglement_of_formation(const AtomicDensityMatrix& rho);

// Tr rho^2 for a Hermitian matrix.
double purity(const Eigen::MatrixXcd& rho);

// Tr[N rho] for a field-mode density matrix in the number basis.
double mean_photon_number(const Eigen::MatrixXcd& rho_field);

// Uhlmann fidelity F = (Tr sqrt(sqrt(a) b sqrt(a)))^2; reduces to
// |<psi|phi>|^2 for pure states.
double state_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
double state_fidelity(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho);

// (1/2) Tr |a - b| for Hermitian a, b.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Wigner function of a field-mode density matrix at phase-space point beta,
// evaluated as (2/pi) <displaced parity>. The matrix is zero-padded so the
// displaced state fits the truncated number basis.
double wigner_numeric(const Eigen::MatrixXcd& rho_field, cxd beta);

}  // namespace qcavity
