#pragma once
#include <complex>

namespace qcavity {

// Physical rates of the driven two-atom / cavity system, hbar = 1.
// Frequencies are in arbitrary but common units; the engines work in the
// dimensionless combinations g/k, kt, gt.
struct ModelParams {
  double g = 1.0;      // atom-cavity coupling (equal for both atoms)
  double k = 1.0;      // cavity decay rate
  double gamma = 0.0;  // atomic spontaneous decay rate
  double omega = 0.0;  // Rabi frequency of the classical drive
  double delta = 0.0;  // drive-cavity detuning (analytic results need 0)

  void validate() const;  // throws InvalidInput

  double g_over_k() const { return g / k; }
  double k_tilde() const { return k / g; }
  double gamma_tilde() const { return gamma / g; }
  double omega_tilde() const { return omega / g; }

  // steady displaced-branch amplitude 2ig/k
  std::complex<double> alpha_ss() const { return {0.0, 2.0 * g / k}; }

  // default Fock truncation: ceil(|a_ss|^2 + 6|a_ss| + 10)
  int default_n_max() const;
};

}  // namespace qcavity
