#include "qcavity/lindblad.hpp"

#include <cmath>

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// K = H - (i/2) sum_i rate_i C+C splits into a real sparse part and a real
// diagonal imaginary part because every operator built here (driven-atom and
// exchange Hamiltonians, a, sigma_j) has purely real matrix elements and
// every C+C is diagonal. Evolving rho = R + iI with real arithmetic then
// halves the flop count of the RK4 stages, which matters for the
// single-thread runtime budget of the parameter sweeps.
struct SplitGenerator {
  RowSparse kr;       // Re K (the Hamiltonian)
  Eigen::VectorXd d;  // -Im K = (1/2) sum rate diag(C+C)
  struct Jump {
    double rate;
    RowSparse c;
    Eigen::SparseMatrix<double> ct;
  };
  std::vector<Jump> jumps;
  int dim = 0;
};

RowSparse to_real_sparse(const SparseCd& m, const char* what) {
  RowSparse out(m.rows(), m.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseCd::InnerIterator it(m, k); it; ++it) {
      if (std::abs(it.value().imag()) > 1e-14)
        throw NumericalGuard(std::string("integrator: ") + what +
                             " has complex entries; the real-split kernel does not apply");
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value().real());
    }
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SplitGenerator split_generator(const Liouvillian& l) {
  SplitGenerator g;
  g.dim = static_cast<int>(l.hamiltonian.rows());
  g.kr = to_real_sparse(l.hamiltonian, "Hamiltonian");
  g.d = Eigen::VectorXd::Zero(g.dim);
  for (const auto& [rate, c] : l.dissipators) {
    SparseCd cc = (c.adjoint() * c).pruned();
    for (int k = 0; k < cc.outerSize(); ++k)
      for (SparseCd::InnerIterator it(cc, k); it; ++it)
        if (it.row() != it.col() && std::abs(it.value()) > 1e-14)
          throw NumericalGuard("integrator: jump operator with non-diagonal C+C unsupported");
    g.d += 0.5 * rate * Eigen::MatrixXcd(cc).diagonal().real();
    RowSparse cr = to_real_sparse(c, "jump operator");
    g.jumps.push_back({rate, cr, Eigen::SparseMatrix<double>(cr.transpose())});
  }
  return g;
}

struct Workspace {
  Eigen::MatrixXd t1, t2, t3;
  Eigen::MatrixXd kr_, ki_, accr, acci, tmpr, tmpi;
  explicit Workspace(int n)
      : t1(n, n), t2(n, n), t3(n, n), kr_(n, n), ki_(n, n), accr(n, n), acci(n, n),
        tmpr(n, n), tmpi(n, n) {}
};

// d(rho)/dt = -i(K rho - (K rho)+) + sum rate C rho C+, valid because rho
// stays Hermitian. In split form with M = K rho:
//   Re out = Mi + Mi^T + sum rate C R C^T,  Mi = Kr I - D R
//   Im out = Mr^T - Mr + sum rate C I C^T,  Mr = Kr R + D I
void rhs(const SplitGenerator& g, const Eigen::MatrixXd& r, const Eigen::MatrixXd& i,
         Eigen::MatrixXd& out_r, Eigen::MatrixXd& out_i, Workspace& w) {
  w.t1.noalias() = g.kr * r;  // Mr before the diagonal piece
  w.t1.noalias() += g.d.asDiagonal() * i;
  w.t2.noalias() = g.kr * i;
  w.t2.noalias() -= g.d.asDiagonal() * r;
  out_r = w.t2 + w.t2.transpose();
  out_i = w.t1.transpose() - w.t1;
  for (const auto& j : g.jumps) {
    w.t3.noalias() = j.c * r;
    out_r.noalias() += j.rate * (w.t3 * j.ct);
    w.t3.noalias() = j.c * i;
    out_i.noalias() += j.rate * (w.t3 * j.ct);
  }
}

void rk4_step(const SplitGenerator& g, Eigen::MatrixXd& r, Eigen::MatrixXd& i, double dt,
              Workspace& w) {
  rhs(g, r, i, w.kr_, w.ki_, w);
  w.accr = w.kr_;
  w.acci = w.ki_;
  w.tmpr = r + (0.5 * dt) * w.kr_;
  w.tmpi = i + (0.5 * dt) * w.ki_;
  rhs(g, w.tmpr, w.tmpi, w.kr_, w.ki_, w);
  w.accr += 2.0 * w.kr_;
  w.acci += 2.0 * w.ki_;
  w.tmpr = r + (0.5 * dt) * w.kr_;
  w.tmpi = i + (0.5 * dt) * w.ki_;
  rhs(g, w.tmpr, w.tmpi, w.kr_, w.ki_, w);
  w.accr += 2.0 * w.kr_;
  w.acci += 2.0 * w.ki_;
  w.tmpr = r + dt * w.kr_;
  w.tmpi = i + dt * w.ki_;
  rhs(g, w.tmpr, w.tmpi, w.kr_, w.ki_, w);
  w.accr += w.kr_;
  w.acci += w.ki_;
  r += (dt / 6.0) * w.accr;
  i += (dt / 6.0) * w.acci;
  // Project back onto Hermitian states (symmetric R, antisymmetric I).
  // The commutator terms of the split RHS are symmetrized by construction,
  // so a rounding-seeded symmetry defect feels only the sandwich term,
  // whose photon-lowering cascade has transient gain ~ rate * n_max and
  // would otherwise grow the defect past the trace guard.
  w.tmpr = r.transpose();
  r += w.tmpr;
  r *= 0.5;
  w.tmpi = i.transpose();
  i -= w.tmpi;
  i *= 0.5;
}

double ceiling_population(const Eigen::MatrixXd& r, int n_max) {
  double pop = 0.0;
  for (int m = 0; m < 4; ++m) {
    const int idx = m * n_max + n_max - 1;
    pop += r(idx, idx);
  }
  return pop;
}

}  // namespace

double Liouvillian::spectral_bound() const {
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(hamiltonian.cols());
  for (int k = 0; k < hamiltonian.outerSize(); ++k)
    for (SparseCd::InnerIterator it(hamiltonian, k); it; ++it)
      col_sums[it.col()] += std::abs(it.value());
  double bound = 2.0 * col_sums.maxCoeff();
  for (const auto& [rate, c] : dissipators) {
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(c.cols());
    for (int k = 0; k < c.outerSize(); ++k)
      for (SparseCd::InnerIterator it(c, k); it; ++it)
        sq[it.col()] += std::norm(it.value());
    bound += rate * sq.maxCoeff();
  }
  return bound;
}

Liouvillian build_liouvillian(const ModelParams& p, HamiltonianForm form, int n_max) {
  p.validate();
  const int n = n_max > 0 ? n_max : p.default_n_max();
  const FockSpace f(n);

  Liouvillian l;
  l.n_max = n;
  const SparseCd a = build_operator(Op::Annihilation, f);
  if (form == HamiltonianForm::EffectiveRwa) {
    if (p.delta != 0.0)
      throw InvalidInput("effective_rwa form is defined on resonance only (delta = 0)");
    SparseCd sx = build_operator(Op::SigmaX, f, 1) + build_operator(Op::SigmaX, f, 2);
    SparseCd quad = a + SparseCd(a.adjoint());
    l.hamiltonian = 0.5 * sx * quad;
  } else {
    SparseCd h = -(p.delta / p.g) * build_operator(Op::Number, f) +
                 p.omega_tilde() * (build_operator(Op::SigmaX, f, 1) +
                                    build_operator(Op::SigmaX, f, 2));
    SparseCd exch = (build_operator(Op::SigmaPlus, f, 1) +
                     build_operator(Op::SigmaPlus, f, 2)) *
                    a;
    h = h + exch + SparseCd(exch.adjoint());
    l.hamiltonian = h;
  }
  if ((SparseCd(l.hamiltonian.adjoint()) - l.hamiltonian).norm() > 1e-12)
    throw NumericalGuard("build_liouvillian: Hamiltonian failed the Hermiticity check");

  l.dissipators.emplace_back(p.k_tilde(), a);
  if (p.gamma > 0.0) {
    l.dissipators.emplace_back(p.gamma_tilde(), build_operator(Op::SigmaMinus, f, 1));
    l.dissipators.emplace_back(p.gamma_tilde(), build_operator(Op::SigmaMinus, f, 2));
  }
  return l;
}

void IntegratorConfig::validate(const Liouvillian& l) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("integrator: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw InvalidInput("integrator: t_end must be >= 0");
  if (record_stride < 1) throw InvalidInput("integrator: record_stride must be >= 1");
  if (!(trace_tol > 0.0) || !(leakage_tol > 0.0))
    throw InvalidInput("integrator: tolerances must be > 0");
  if (dt * l.spectral_bound() >= 0.1)
    throw InvalidInput("integrator: dt too large for the generator's spectral bound");
}

double default_dt(const ModelParams& p, const Liouvillian& l) {
  double dt = 0.001 / p.k_tilde();
  if (p.omega > 0.0) dt = std::min(dt, 0.01 / p.omega_tilde());
  dt = std::min(dt, 0.09 / l.spectral_bound());
  return dt;
}

IntegrationStats integrate(const TripartiteState& rho0, const Liouvillian& l,
                           const IntegratorConfig& cfg,
                           const std::function<void(double, const Eigen::MatrixXcd&)>& observer) {
  IntegratorConfig c = cfg;
  if (c.dt == 0.0) throw InvalidInput("integrator: dt must be set (see default_dt)");
  c.validate(l);
  if (rho0.n_max != l.n_max)
    throw InvalidInput("integrator: state and Liouvillian truncation differ");

  const SplitGenerator g = split_generator(l);
  const Eigen::MatrixXcd rho_std = rho0.in_basis(AtomicBasis::Standard).rho;
  Eigen::MatrixXd r = rho_std.real();
  Eigen::MatrixXd i = rho_std.imag();
  Workspace w(g.dim);

  const long n_steps = static_cast<long>(std::ceil(c.t_end / c.dt - 1e-9));
  IntegrationStats stats;
  auto emit = [&](double t) {
    if (observer) observer(t, r.cast<cxd>() + cxd(0.0, 1.0) * i.cast<cxd>());
  };
  emit(0.0);

  double trace_prev = r.trace();
  for (long s = 1; s <= n_steps; ++s) {
    rk4_step(g, r, i, c.dt, w);
    const double trace_now = r.trace();
    const double drift = std::abs(trace_now - trace_prev);
    trace_prev = trace_now;
    stats.max_trace_drift = std::max(stats.max_trace_drift, drift);
    if (drift > c.trace_tol)
      throw NumericalGuard("integrator: per-step trace drift " + std::to_string(drift) +
                           " exceeds tolerance at step " + std::to_string(s));
    const double ceiling = ceiling_population(r, l.n_max);
    stats.max_ceiling_population = std::max(stats.max_ceiling_population, ceiling);
    if (ceiling > c.leakage_tol)
      throw NumericalGuard("integrator: ceiling population " + std::to_string(ceiling) +
                           " exceeds leakage tolerance; increase n_max");
    stats.steps = s;
    if (s % c.record_stride == 0) emit(s * c.dt);
  }
  return stats;
}

TripartiteState steady_state(const TripartiteState& rho0, const Liouvillian& l, double tol,
                             double t_max_gt) {
  if (rho0.n_max != l.n_max)
    throw InvalidInput("steady_state: state and Liouvillian truncation differ");
  const SplitGenerator g = split_generator(l);
  const Eigen::MatrixXcd rho_std = rho0.in_basis(AtomicBasis::Standard).rho;
  Eigen::MatrixXd r = rho_std.real();
  Eigen::MatrixXd i = rho_std.imag();
  Workspace w(g.dim);

  const double dt = 0.09 / l.spectral_bound();
  const long chunk = 256;
  double t = 0.0;
  while (t < t_max_gt) {
    for (long s = 0; s < chunk; ++s) rk4_step(g, r, i, dt, w);
    t += chunk * dt;
    rhs(g, r, i, w.kr_, w.ki_, w);
    const double rate = std::max(w.kr_.cwiseAbs().maxCoeff(), w.ki_.cwiseAbs().maxCoeff());
    if (rate < tol) {
      Eigen::MatrixXcd rho = r.cast<cxd>() + cxd(0.0, 1.0) * i.cast<cxd>();
      // symmetrize away integrator roundoff before the constructor's checks
      rho = 0.5 * (rho + rho.adjoint().eval());
      rho /= rho.trace().real();
      return {std::move(rho), l.n_max, AtomicBasis::Standard};
    }
  }
  throw NumericalGuard("steady_state: no convergence within the step budget");
}

}  // namespace qcavity
