#include "qcavity/mcwf.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "qcavity/errors.hpp"
#include "qcavity/lindblad.hpp"
#include "qcavity/metrics.hpp"
#include "qcavity/philox.hpp"

namespace qcavity {

namespace {

// Trajectories per reduction block. Each block is summed in trajectory order
// by whichever worker claims it and blocks are combined in index order, so
// the floating-point addition order never depends on the thread count.
constexpr int kBlockSize = 16;

struct Engine {
  int n_max = 0, dim = 0;
  double dt = 0.0, k_tilde = 0.0, gamma_tilde = 0.0;
  long n_steps = 0;
  int stride = 1;
  int n_records = 0;
  bool with_atom_decay = false;
  bool store_full = false;
  Eigen::SparseMatrix<cxd, Eigen::RowMajor> h_eff;
  Eigen::VectorXd photon;  // photon number by composite index
};

struct RecordAcc {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  double n = 0, n2 = 0, pe = 0, pe2 = 0, pg = 0, pg2 = 0;
};

struct BlockAcc {
  std::vector<RecordAcc> rec;
  std::vector<Eigen::MatrixXcd> full;
  double max_dp = 0.0, max_residual = 0.0;
};

void record_state(const Engine& e, const Eigen::VectorXcd& psi, int rec_index,
                  BlockAcc& acc) {
  RecordAcc& r = acc.rec[rec_index];
  const int n = e.n_max;
  for (int m = 0; m < 4; ++m)
    for (int mp = m; mp < 4; ++mp) {
      cxd s(0.0);
      for (int q = 0; q < n; ++q) s += psi[m * n + q] * std::conj(psi[mp * n + q]);
      r.rho(m, mp) += s;
      if (mp != m) r.rho(mp, m) += std::conj(s);
    }
  double nn = 0.0, pe = 0.0, pg = 0.0;
  for (int idx = 0; idx < e.dim; ++idx) nn += e.photon[idx] * std::norm(psi[idx]);
  for (int idx = 0; idx < 2 * n; ++idx) pe += std::norm(psi[idx]);
  for (int idx = 2 * n; idx < e.dim; ++idx) pg += std::norm(psi[idx]);
  r.n += nn;
  r.n2 += nn * nn;
  r.pe += pe;
  r.pe2 += pe * pe;
  r.pg += pg;
  r.pg2 += pg * pg;
  if (e.store_full) acc.full[rec_index].noalias() += psi * psi.adjoint();
}

void apply_cavity_jump(const Engine& e, Eigen::VectorXcd& psi) {
  const int n = e.n_max;
  for (int m = 0; m < 4; ++m) {
    const int base = m * n;
    for (int q = 0; q < n - 1; ++q)
      psi[base + q] = std::sqrt(double(q + 1)) * psi[base + q + 1];
    psi[base + n - 1] = cxd(0.0);
  }
}

void apply_atom_jump(const Engine& e, int atom, Eigen::VectorXcd& psi) {
  const int n = e.n_max;
  // composite index ((a1*2 + a2)*n_max + q), a = 0 excited / 1 ground
  for (int other = 0; other < 2; ++other)
    for (int q = 0; q < n; ++q) {
      const int src = (atom == 1 ? other : 2 * other) * n + q;
      const int dst = (atom == 1 ? 2 + other : 2 * other + 1) * n + q;
      psi[dst] = psi[src];
      psi[src] = cxd(0.0);
    }
}

void simulate_trajectory(const Engine& e, const Eigen::VectorXcd& psi0, std::uint64_t seed,
                         long traj, BlockAcc& acc, std::vector<JumpRecord>& jumps) {
  PhiloxStream rng(seed, static_cast<std::uint64_t>(traj));
  Eigen::VectorXcd psi = psi0;
  Eigen::VectorXcd hpsi(e.dim);
  record_state(e, psi, 0, acc);
  int rec_index = 1;

  for (long s = 1; s <= e.n_steps; ++s) {
    double dp1 = 0.0, dp2 = 0.0;
    if (e.with_atom_decay) {
      const int n = e.n_max;
      double x1 = 0.0, x2 = 0.0;
      for (int idx = 0; idx < 2 * n; ++idx) x1 += std::norm(psi[idx]);  // atom1 excited
      for (int other = 0; other < 2; ++other)                           // atom2 excited
        for (int q = 0; q < n; ++q) x2 += std::norm(psi[2 * other * n + q]);
      dp1 = e.dt * e.gamma_tilde * x1;
      dp2 = e.dt * e.gamma_tilde * x2;
    }
    double nphot = 0.0;
    for (int idx = 0; idx < e.dim; ++idx) nphot += e.photon[idx] * std::norm(psi[idx]);
    const double dpc = e.dt * e.k_tilde * nphot;
    const double dp = dp1 + dp2 + dpc;
    acc.max_dp = std::max(acc.max_dp, dp);
    if (dp > 0.1)
      throw NumericalGuard("mcwf: total jump probability " + std::to_string(dp) +
                           " exceeds 0.1; reduce dt");

    if (rng.uniform() < dp) {
      // channel order (atom1, atom2, cavity) is part of the determinism contract
      const double v = rng.uniform() * dp;
      JumpChannel ch;
      if (v < dp1) {
        apply_atom_jump(e, 1, psi);
        ch = JumpChannel::Atom1;
      } else if (v < dp1 + dp2) {
        apply_atom_jump(e, 2, psi);
        ch = JumpChannel::Atom2;
      } else {
        apply_cavity_jump(e, psi);
        ch = JumpChannel::Cavity;
      }
      const double nrm = psi.norm();
      if (nrm < 1e-150) throw NumericalGuard("mcwf: jump produced a null state");
      psi /= nrm;
      jumps.push_back({s * e.dt, ch});
    } else {
      hpsi.noalias() = e.h_eff * psi;
      psi -= cxd(0.0, e.dt) * hpsi;
      const double nrm2 = psi.squaredNorm();
      acc.max_residual = std::max(acc.max_residual, std::abs(nrm2 - (1.0 - dp)));
      psi /= std::sqrt(nrm2);
    }
    if (s % e.stride == 0) record_state(e, psi, rec_index++, acc);
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QCAVITY_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

double default_mcwf_dt(const ModelParams& p, int n_max) {
  const double jump_rate = p.k_tilde() * (n_max - 1) + 2.0 * p.gamma_tilde();
  return std::min(2e-4, 0.0099 / jump_rate);
}

Eigen::VectorXcd product_with_vacuum(const AtomicPreparation& prep, int n_max) {
  prep.validate();
  const FockSpace f(n_max);
  const Eigen::Vector4cd c = prep.standard_coeffs();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(tripartite_dim(f));
  for (int m = 0; m < 4; ++m) psi[m * n_max] = c[m];
  return psi;
}

TrajectoryEnsemble run_ensemble(const Eigen::VectorXcd& psi0_standard, const McwfConfig& cfg) {
  cfg.params.validate();
  if (cfg.n_traj < 1) throw InvalidInput("mcwf: n_traj must be >= 1");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end))
    throw InvalidInput("mcwf: t_end must be >= 0");
  if (cfg.record_stride < 1) throw InvalidInput("mcwf: record_stride must be >= 1");

  Engine e;
  e.n_max = cfg.n_max > 0 ? cfg.n_max : cfg.params.default_n_max();
  e.dim = 4 * e.n_max;
  if (psi0_standard.size() != e.dim)
    throw InvalidInput("mcwf: initial state dimension does not match 4*n_max");
  if (std::abs(psi0_standard.norm() - 1.0) > 1e-10)
    throw InvalidInput("mcwf: initial state must be normalized");
  e.dt = cfg.dt > 0.0 ? cfg.dt : default_mcwf_dt(cfg.params, e.n_max);
  const double worst_rate =
      cfg.params.k_tilde() * (e.n_max - 1) + 2.0 * cfg.params.gamma_tilde();
  if (e.dt * worst_rate >= 0.01)
    throw InvalidInput("mcwf: dt * (max jump rate) must stay below 0.01");
  e.k_tilde = cfg.params.k_tilde();
  e.gamma_tilde = cfg.params.gamma_tilde();
  e.with_atom_decay = cfg.params.gamma > 0.0;
  e.stride = cfg.record_stride;
  e.store_full = cfg.store_full_snapshots;
  e.n_steps = static_cast<long>(std::ceil(cfg.t_end / e.dt - 1e-9));
  e.n_records = 1 + static_cast<int>(e.n_steps / e.stride);

  const Liouvillian l =
      build_liouvillian(cfg.params, HamiltonianForm::FullInteraction, e.n_max);
  Eigen::VectorXd damping = Eigen::VectorXd::Zero(e.dim);
  for (const auto& [rate, c] : l.dissipators) {
    const SparseCd cc = (c.adjoint() * c).pruned();
    damping += rate * Eigen::MatrixXcd(cc).diagonal().real();
  }
  SparseCd h_eff = l.hamiltonian;
  SparseCd dsp(e.dim, e.dim);
  std::vector<Eigen::Triplet<cxd>> dt_trips;
  for (int idx = 0; idx < e.dim; ++idx)
    dt_trips.emplace_back(idx, idx, cxd(0.0, -0.5 * damping[idx]));
  dsp.setFromTriplets(dt_trips.begin(), dt_trips.end());
  e.h_eff = Eigen::SparseMatrix<cxd, Eigen::RowMajor>(h_eff + dsp);
  e.photon = Eigen::VectorXd(e.dim);
  for (int m = 0; m < 4; ++m)
    for (int q = 0; q < e.n_max; ++q) e.photon[m * e.n_max + q] = q;

  const int n_blocks = (cfg.n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<BlockAcc> blocks(n_blocks);
  for (auto& b : blocks) {
    b.rec.resize(e.n_records);
    if (e.store_full)
      b.full.assign(e.n_records, Eigen::MatrixXcd::Zero(e.dim, e.dim));
  }
  std::vector<std::vector<JumpRecord>> jump_log(cfg.n_traj);

  const int n_workers = std::min(resolve_threads(cfg.threads), n_blocks);
  std::atomic<int> next_block{0};
  std::vector<std::exception_ptr> errors(n_workers);
  auto work = [&](int worker) {
    try {
      while (true) {
        const int b = next_block.fetch_add(1);
        if (b >= n_blocks) break;
        const long lo = static_cast<long>(b) * kBlockSize;
        const long hi = std::min<long>(lo + kBlockSize, cfg.n_traj);
        for (long traj = lo; traj < hi; ++traj)
          simulate_trajectory(e, psi0_standard, cfg.seed, traj, blocks[b], jump_log[traj]);
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  TrajectoryEnsemble ens;
  ens.n_traj = cfg.n_traj;
  ens.n_max = e.n_max;
  ens.jump_log = std::move(jump_log);
  ens.times.resize(e.n_records);
  for (int r = 0; r < e.n_records; ++r)
    ens.times[r] = (r == 0) ? 0.0 : double(r) * e.stride * e.dt;
  ens.atomic_rho.assign(e.n_records, Eigen::Matrix4cd::Zero());
  ens.mean_n.assign(e.n_records, 0.0);
  ens.p_e.assign(e.n_records, 0.0);
  ens.p_g.assign(e.n_records, 0.0);
  ens.var_mean_n.assign(e.n_records, 0.0);
  ens.var_p_e.assign(e.n_records, 0.0);
  ens.var_p_g.assign(e.n_records, 0.0);
  if (e.store_full)
    ens.full_rho.assign(e.n_records, Eigen::MatrixXcd::Zero(e.dim, e.dim));

  for (int b = 0; b < n_blocks; ++b) {
    for (int r = 0; r < e.n_records; ++r) {
      const RecordAcc& a = blocks[b].rec[r];
      ens.atomic_rho[r] += a.rho;
      ens.mean_n[r] += a.n;
      ens.var_mean_n[r] += a.n2;
      ens.p_e[r] += a.pe;
      ens.var_p_e[r] += a.pe2;
      ens.p_g[r] += a.pg;
      ens.var_p_g[r] += a.pg2;
      if (e.store_full) ens.full_rho[r] += blocks[b].full[r];
    }
    ens.max_delta_p = std::max(ens.max_delta_p, blocks[b].max_dp);
    ens.max_norm_residual = std::max(ens.max_norm_residual, blocks[b].max_residual);
  }
  const double inv = 1.0 / cfg.n_traj;
  for (int r = 0; r < e.n_records; ++r) {
    ens.atomic_rho[r] *= inv;
    ens.mean_n[r] *= inv;
    ens.p_e[r] *= inv;
    ens.p_g[r] *= inv;
    ens.var_mean_n[r] = std::max(0.0, ens.var_mean_n[r] * inv - ens.mean_n[r] * ens.mean_n[r]);
    ens.var_p_e[r] = std::max(0.0, ens.var_p_e[r] * inv - ens.p_e[r] * ens.p_e[r]);
    ens.var_p_g[r] = std::max(0.0, ens.var_p_g[r] * inv - ens.p_g[r] * ens.p_g[r]);
    if (e.store_full) ens.full_rho[r] *= inv;
    if (std::abs(ens.atomic_rho[r].trace().real() - 1.0) > 1e-12)
      throw NumericalGuard("mcwf: averaged snapshot lost unit trace");
  }
  return ens;
}

ObservableSeries ensemble_observables(const TrajectoryEnsemble& ens) {
  if (ens.times.empty()) throw InvalidInput("ensemble_observables: empty ensemble");
  ObservableSeries s;
  s.times = ens.times;
  s.mean_n = ens.mean_n;
  s.p_e = ens.p_e;
  s.p_g = ens.p_g;
  s.atomic_rho = ens.atomic_rho;
  s.eof.reserve(ens.times.size());
  for (const auto& rho : ens.atomic_rho)
    s.eof.push_back(
        entanglement_of_formation(AtomicDensityMatrix{rho, AtomicBasis::Standard}));
  return s;
}

bool ConvergenceReport::passed(double max_violation_fraction) const {
  for (const auto* d : {&mean_n, &p_e, &p_g})
    if (d->n_points > 0 && d->violation_fraction >= max_violation_fraction) return false;
  return true;
}

ConvergenceReport convergence_report(const TrajectoryEnsemble& ens,
                                     const ReferenceSeries& ref, BandCheck bands) {
  if (ref.times.size() != ens.times.size())
    throw InvalidInput("convergence_report: time grid size mismatch");
  for (size_t i = 0; i < ref.times.size(); ++i)
    if (std::abs(ref.times[i] - ens.times[i]) > 1e-9)
      throw InvalidInput("convergence_report: time grids differ");

  auto check = [&](const std::vector<double>& mean, const std::vector<double>& var,
                   const std::vector<double>& reference) {
    ObservableDeviation d;
    if (reference.empty()) return d;
    if (reference.size() != mean.size())
      throw InvalidInput("convergence_report: reference length mismatch");
    int violations = 0;
    for (size_t i = 0; i < mean.size(); ++i) {
      const double se = std::sqrt(var[i] / ens.n_traj);
      const double dev = std::abs(mean[i] - reference[i]);
      d.max_abs_deviation = std::max(d.max_abs_deviation, dev);
      if (dev > bands.z_threshold * se + bands.systematic_allowance) ++violations;
    }
    d.n_points = static_cast<int>(mean.size());
    d.violation_fraction = double(violations) / d.n_points;
    return d;
  };
  ConvergenceReport rep;
  rep.mean_n = check(ens.mean_n, ens.var_mean_n, ref.mean_n);
  rep.p_e = check(ens.p_e, ens.var_p_e, ref.p_e);
  rep.p_g = check(ens.p_g, ens.var_p_g, ref.p_g);
  return rep;
}

}  // namespace qcavity
