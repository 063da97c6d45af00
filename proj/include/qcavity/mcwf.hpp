#pragma once

#include <cstdint>
#include <vector>

#include "qcavity/fock.hpp"
#include "qcavity/model.hpp"
#include "qcavity/state.hpp"

namespace qcavity {

// Quantum-jump unraveling with collapse channels sqrt(gamma~) sigma_1,
// sqrt(gamma~) sigma_2 and sqrt(k~) a, evolving under the full driven
// Hamiltonian. Time variable is the dimensionless gt.
struct McwfConfig {
  ModelParams params;
  int n_traj = 500;
  std::uint64_t seed = 1;
  double dt = 0.0;        // 0 selects default_mcwf_dt
  double t_end = 0.0;
  int record_stride = 1;  // observables recorded every record_stride steps
  int n_max = 0;          // 0 selects params.default_n_max()
  int threads = 0;        // 0: QCAVITY_THREADS env var, else hardware count
  bool store_full_snapshots = false;  // keep averaged tripartite matrices too
};

// min(2e-4, 0.0099 / (k~ (n_max-1) + 2 gamma~)): keeps the worst-case
// per-step jump probability under the 0.01 design bound and the first-order
// propagator phase error negligible against the statistical bands.
double default_mcwf_dt(const ModelParams& p, int n_max);

enum class JumpChannel { Atom1 = 0, Atom2 = 1, Cavity = 2 };
struct JumpRecord {
  double t;
  JumpChannel channel;
};

struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<Eigen::Matrix4cd> atomic_rho;  // ensemble averages, standard basis
  std::vector<double> mean_n, p_e, p_g;      // single-atom populations
  std::vector<double> var_mean_n, var_p_e, var_p_g;  // population variances
  std::vector<Eigen::MatrixXcd> full_rho;    // filled when store_full_snapshots
  std::vector<std::vector<JumpRecord>> jump_log;  // indexed by trajectory
  double max_delta_p = 0.0;        // largest per-step total jump probability
  double max_norm_residual = 0.0;  // max ||psi'|^2 - (1-dp)| before renormalizing
  int n_traj = 0;
  int n_max = 0;
};

// |prep> tensor |vacuum> as a standard-basis state vector.
Eigen::VectorXcd product_with_vacuum(const AtomicPreparation& prep, int n_max);

TrajectoryEnsemble run_ensemble(const Eigen::VectorXcd& psi0_standard, const McwfConfig& cfg);

struct ObservableSeries {
  std::vector<double> times, mean_n, p_e, p_g, eof;
  std::vector<Eigen::Matrix4cd> atomic_rho;
};
ObservableSeries ensemble_observables(const TrajectoryEnsemble& ens);

// Reference curves on the ensemble's time grid; empty vectors are skipped.
struct ReferenceSeries {
  std::vector<double> times;
  std::vector<double> mean_n, p_e, p_g;
};
struct BandCheck {
  double z_threshold = 3.0;
  double systematic_allowance = 0.0;  // absolute slack added to each band
};
struct ObservableDeviation {
  double max_abs_deviation = 0.0;
  double violation_fraction = 0.0;
  int n_points = 0;
};
struct ConvergenceReport {
  ObservableDeviation mean_n, p_e, p_g;
  bool passed(double max_violation_fraction = 0.01) const;
};
ConvergenceReport convergence_report(const TrajectoryEnsemble& ens,
                                     const ReferenceSeries& ref, BandCheck bands = {});

}  // namespace qcavity
