#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qcavity/fock.hpp"
#include "qcavity/model.hpp"
#include "qcavity/state.hpp"

namespace qcavity {

enum class HamiltonianForm { FullInteraction, EffectiveRwa };

// Master-equation generator in units of hbar*g; the time variable everywhere
// in this module is the dimensionless gt.
struct Liouvillian {
  SparseCd hamiltonian;
  std::vector<std::pair<double, SparseCd>> dissipators;  // (rate, jump op)
  int n_max = 0;

  // Crude upper estimate of the generator's spectral radius: twice the
  // Hamiltonian one-norm plus the largest anticommutator damping rate.
  double spectral_bound() const;
};

// FullInteraction: -delta~ a+a + omega~ (sx1+sx2) + (s1+ a + s1 a+ + s2+ a + s2 a+).
// EffectiveRwa:    (1/2)(sx1+sx2)(a + a+), valid only on resonance (throws
// for delta != 0; off resonance the rotating-frame Hamiltonian is
// time dependent and out of scope).
// Dissipators: (k/g, a) and, when gamma > 0, (gamma/g, sigma_j) for both atoms.
Liouvillian build_liouvillian(const ModelParams& p, HamiltonianForm form, int n_max = 0);

struct IntegratorConfig {
  double dt = 0.0;        // gt units; 0 selects default_dt
  double t_end = 0.0;     // gt units
  int record_stride = 1;  // observer is called every record_stride steps
  double trace_tol = 1e-10;
  double leakage_tol = 1e-6;  // ceiling-row population abort threshold

  void validate(const Liouvillian& l) const;
};

// min(0.001 / k_tilde, 0.01 / omega_tilde, 0.09 / spectral bound).
double default_dt(const ModelParams& p, const Liouvillian& l);

// Fixed-step RK4 on d(rho)/dt = -i[H,rho] + sum_i (r_i/2)(2 C rho C+ -
// C+C rho - rho C+C). The observer receives (t, rho) in the standard basis
// at t=0 and after every record_stride-th step. Aborts when the per-step
// trace drift exceeds trace_tol or the ceiling population exceeds
// leakage_tol.
struct IntegrationStats {
  double max_trace_drift = 0.0;
  double max_ceiling_population = 0.0;
  long steps = 0;
};
IntegrationStats integrate(const TripartiteState& rho0, const Liouvillian& l,
                           const IntegratorConfig& cfg,
                           const std::function<void(double, const Eigen::MatrixXcd&)>& observer);

// Integrates until the RHS max norm falls below tol (checked every few
// hundred steps); throws NumericalGuard if t_max_gt is exhausted first.
TripartiteState steady_state(const TripartiteState& rho0, const Liouvillian& l,
                             double tol = 1e-10, double t_max_gt = 1e5);

}  // namespace qcavity
