#pragma once
#include <string>

#include <Eigen/Dense>

#include "qcavity/fock.hpp"

namespace qcavity {

// Atomic-pair bases. Standard is the product basis {ee, eg, ge, gg} with
// e=0, g=1 per atom. Rotated is {++, +-, -+, --} built from
// |±> = (|g> ± |e>)/sqrt2. Bell is {Phi+, Phi-, Psi+, Psi-} with
// Phi± = (|ee> ± |gg>)/sqrt2, Psi± = (|eg> ± |ge>)/sqrt2. Magic applies the
// phases {1, -i, -i, 1} to the Bell vectors, which makes the spin-flip
// operation plain complex conjugation.
enum class AtomicBasis { Standard, Rotated, Bell, Magic };

const char* basis_name(AtomicBasis b);

// Columns are the basis vectors expressed in standard coordinates.
Eigen::Matrix4cd basis_in_standard(AtomicBasis b);

// U with v_to = U v_from and rho_to = U rho_from U^dag.
Eigen::Matrix4cd basis_change(AtomicBasis from, AtomicBasis to);

// 4x4 atomic density matrix tagged with the basis its entries are written in.
struct AtomicDensityMatrix {
  Eigen::Matrix4cd m;
  AtomicBasis basis = AtomicBasis::Standard;
  AtomicDensityMatrix in_basis(AtomicBasis b) const {
    return {basis_change(basis, b) * m * basis_change(basis, b).adjoint(), b};
  }
};

// Pure two-atom preparation, stored as Bell-basis coefficients
// c = (c1, c2, c3, c4) for c1 Phi+ + c2 Phi- + c3 Psi+ + c4 Psi-.
struct AtomicPreparation {
  Eigen::Vector4cd c;

  void validate() const;  // unit norm within 1e-10, else InvalidInput

  Eigen::Vector4cd standard_coeffs() const;  // amplitudes in {ee, eg, ge, gg}
  Eigen::Vector4cd rotated_coeffs() const;   // amplitudes in {++, +-, -+, --}

  static AtomicPreparation bell(int i);  // i in 0..3
  // (a1|e> + b1|g>) (x) (a2|e> + b2|g>), normalized per atom
  static AtomicPreparation product(cxd a1, cxd b1, cxd a2, cxd b2);
  // "gg", "ee", "eg", "ge", "phi+", "phi-", "psi+", "psi-"
  static AtomicPreparation from_label(const std::string& label);
};

// Density matrix of the full atom1 (x) atom2 (x) field system. The
// constructor enforces Hermiticity (1e-10) and unit trace (1e-9); the
// positivity check is separate because it needs a full eigensolve.
struct TripartiteState {
  Eigen::MatrixXcd rho;
  int n_max;
  AtomicBasis basis;

  TripartiteState(Eigen::MatrixXcd m, int n, AtomicBasis b);

  void validate_positive(double tol = 1e-8) const;  // throws NumericalGuard

  TripartiteState in_basis(AtomicBasis b) const;  // rotate the atomic factor
  Eigen::Matrix4cd atomic_reduced() const;        // trace out the field
  Eigen::MatrixXcd field_reduced() const;         // trace out both atoms

  // n x n field block <i| rho |j> of the atomic-pair indices in this basis
  Eigen::MatrixXcd block(int i, int j) const;
};

// Partial traces on raw matrices (dim 4n), atomic indices in whatever basis
// the matrix is written in.
Eigen::Matrix4cd partial_trace_field(const Eigen::MatrixXcd& rho, int n_max);
Eigen::MatrixXcd partial_trace_atoms(const Eigen::MatrixXcd& rho, int n_max);

// rho' = (U (x) I_field) rho (U (x) I_field)^dag for a 4x4 atomic unitary
Eigen::MatrixXcd apply_atomic_unitary(const Eigen::MatrixXcd& rho, int n_max,
                                      const Eigen::Matrix4cd& u);

}  // namespace qcavity
