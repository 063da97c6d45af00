#pragma once
#include <array>
#include <vector>

#include "qcavity/model.hpp"
#include "qcavity/state.hpp"

namespace qcavity {

// Closed-form solution of the dissipative dynamics for two resonantly
// coupled, strongly driven atoms and a cavity mode starting in vacuum
// (gamma = 0, delta = 0). In the rotated atomic basis the field is pushed
// into displaced branches |∓alpha(t)> for |±±> and stays in vacuum for
// |+−>, |−+>; coherences decay with f1(t) (one-atom) and f2 = f1^4
// (two-atom).

struct DecoherenceProfile {
  cxd alpha;      // displaced-branch amplitude i(2g/k)(1 - e^{-kt/2})
  double f1;      // exp{-2g^2 t/k + (4g^2/k^2)(1 - e^{-kt/2})}
  double f2;      // f1^4, computed as (f1^2)^2
  double log_f1;  // exponent of f1, kept for overflow-safe coefficient products
};

// t is absolute time (kt = params.k * t). Requires t >= 0 and delta == 0.
DecoherenceProfile decoherence_profile(const ModelParams& p, double t);

// Field-space block <i| rho(t) |j> of the rotated-basis decomposition,
// i, j in 0..3 over {++, +-, -+, --}.
Eigen::MatrixXcd analytic_block(const AtomicPreparation& prep, const ModelParams& p,
                                double t, int i, int j, const FockSpace& f);

// All 16 blocks of the ground-state (|gg>) preparation, indexed [i][j].
std::array<std::array<Eigen::MatrixXcd, 4>, 4> ground_state_blocks(const ModelParams& p,
                                                                   double t,
                                                                   const FockSpace& f);

// Full tripartite density matrix in the rotated basis. n_max = 0 picks the
// default truncation rule.
TripartiteState assemble_full_state(const AtomicPreparation& prep, const ModelParams& p,
                                    double t, int n_max = 0);

// Reduced field state: mixture of |-alpha>, |0>, |alpha> branches.
Eigen::MatrixXcd field_reduced_analytic(const AtomicPreparation& prep,
                                        const ModelParams& p, double t,
                                        const FockSpace& f);

// Reduced two-atom state in the magic basis (closed form).
AtomicDensityMatrix atomic_reduced_analytic(const AtomicPreparation& prep,
                                            const ModelParams& p, double t);

// Purities of the whole system, the field, and the atom pair. All three are
// closed forms in the block coefficients; no truncation enters.
struct PurityTriple {
  double whole, field, atoms;
};
PurityTriple purities(const AtomicPreparation& prep, const ModelParams& p, double t);

// Single-atom and joint two-atom measurement probabilities in {e, g}.
// Joints are read off the standard-basis diagonal of the reduced atomic
// state; marginals refer to atom 1 / atom 2 respectively.
struct AtomicProbabilities {
  double p_e, p_g;              // atom 1 marginals
  double p_ee, p_eg, p_ge, p_gg;
};
AtomicProbabilities atomic_probabilities(const AtomicPreparation& prep,
                                         const ModelParams& p, double t);

// C_lm = P_lm / (P_l P_m). Throws InvalidInput when a marginal vanishes
// (e.g. the gg preparation at t = 0).
struct CorrelationFunctions {
  double c_ee, c_eg, c_gg;
};
CorrelationFunctions correlation_functions(const AtomicPreparation& prep,
                                           const ModelParams& p, double t);

// (|c1|^2 + |c3|^2) |alpha(t)|^2
double mean_photon_analytic(const AtomicPreparation& prep, const ModelParams& p, double t);

// ---- conditional states for the ground-state preparation ----

enum class JointOutcome { ee, eg, ge, gg };
JointOutcome joint_outcome_from_label(const std::string& label);
const char* joint_outcome_name(JointOutcome o);

// Field state conditioned on a joint atomic measurement, gg preparation.
// Throws InvalidInput when the outcome has zero probability (eg/ge at t=0).
Eigen::MatrixXcd conditional_field_state(const ModelParams& p, double t, JointOutcome o,
                                         const FockSpace& f);

// kt << 1 limit of the conditioned field: three-component cat states built
// on alpha_t = i g t.
Eigen::VectorXcd transient_cat_state(const ModelParams& p, double t, JointOutcome o,
                                     const FockSpace& f);

// kt -> infinity limit of the conditioned field.
Eigen::MatrixXcd conditional_field_steady(const ModelParams& p, JointOutcome o,
                                          const FockSpace& f);

// Closed-form Wigner function of the conditioned field state at beta.
double wigner_conditional(const ModelParams& p, double t, JointOutcome o, cxd beta);

// Phase-space kernel chi_ij(beta) = Tr_f[rho_ij D(beta)] of each rotated
// block, any preparation. Satisfies chi_ji(beta) = conj(chi_ij(-beta)).
cxd characteristic_chi(const AtomicPreparation& prep, const ModelParams& p, double t,
                       int i, int j, cxd beta);

// Atomic state heralded by a null photodetection: the preparation's
// component in the dissipation-free span of {Phi-, Psi-}, normalized.
// Also returns the asymptotic heralding weight |c2|^2 + |c4|^2.
struct NullMeasurementResult {
  AtomicPreparation prep;
  double weight;
};
NullMeasurementResult null_measurement_bell(const AtomicPreparation& prep);

// Asymptotic decay rate of the two-atom coherence f2: 2g in strong coupling
// (g/k >= 0.5), 8g^2/k in weak coupling.
struct DisentanglementRate {
  double rate;
  const char* regime;  // "strong" | "weak"
};
DisentanglementRate disentanglement_rate(const ModelParams& p);

// Least-squares slope of ln f2 over the window where f2 crosses [0.9, 0.3],
// i.e. the early exponential fall-off. rate = -slope in absolute time units.
struct TailFit {
  double rate;
  double kt_lo, kt_hi;
};
TailFit fit_f2_decay_rate(const ModelParams& p, int samples = 200);

}  // namespace qcavity
