#include "qcavity/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "qcavity/analytic.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/figures.hpp"
#include "qcavity/io.hpp"
#include "qcavity/lindblad.hpp"
#include "qcavity/mcwf.hpp"
#include "qcavity/metrics.hpp"

namespace fs = std::filesystem;

namespace qcavity {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Scale factor from the config's time unit to gt.
double unit_to_gt(const ExperimentConfig& cfg) {
  return (cfg.time_unit == "kt") ? cfg.params.g_over_k() : 1.0;
}

// Uniform recording grids for the integrators: the step is snapped so a
// whole number of steps lands exactly on each output time.
struct StrideGrid {
  double dt_gt = 0.0;
  double t_end_gt = 0.0;
  int stride = 0;
};
StrideGrid snap_grid(const ExperimentConfig& cfg, double dt_target_gt) {
  if (cfg.t_start != 0.0) {
    throw InvalidInput("mode=" + cfg.mode + " requires time.t_start = 0");
  }
  const double delta_gt = (cfg.t_end / (cfg.n_points - 1)) * unit_to_gt(cfg);
  StrideGrid g;
  g.stride = std::max(1, static_cast<int>(std::ceil(delta_gt / dt_target_gt - 1e-12)));
  g.dt_gt = delta_gt / g.stride;
  g.t_end_gt = delta_gt * (cfg.n_points - 1);
  return g;
}

struct JointProbs {
  double ee, eg, ge, gg;
};

// Correlation functions from a standard-basis atomic density matrix,
// matching the closed-form convention C_lm = P_lm / (P_l(1) P_m(2)).
void correlations_from_joints(const JointProbs& p, double& c_ee, double& c_eg,
                              double& c_gg) {
  const double pe1 = p.ee + p.eg, pg1 = p.ge + p.gg;
  const double pe2 = p.ee + p.ge, pg2 = p.eg + p.gg;
  const double tol = 1e-15;
  if (pe1 < tol || pg1 < tol || pe2 < tol || pg2 < tol) {
    throw InvalidInput(
        "correlation functions are undefined where a single-atom marginal "
        "vanishes");
  }
  c_ee = p.ee / (pe1 * pe2);
  c_eg = p.eg / (pe1 * pg2);
  c_gg = p.gg / (pg1 * pg2);
}

std::vector<Column> make_columns(const ExperimentConfig& cfg) {
  std::vector<Column> cols;
  cols.push_back({cfg.time_unit, cfg.time_grid()});
  for (const auto& name : cfg.outputs) {
    cols.push_back({name, std::vector<double>(cfg.time_grid().size(), 0.0)});
  }
  return cols;
}

void run_analytic(const ExperimentConfig& cfg, std::vector<Column>& cols,
                  RunDiagnostics& diag) {
  const auto grid = cfg.time_grid();
  const bool need_purity = contains(cfg.outputs, "purity_whole") ||
                           contains(cfg.outputs, "purity_field") ||
                           contains(cfg.outputs, "purity_atoms");
  const bool need_probs =
      contains(cfg.outputs, "p_e") || contains(cfg.outputs, "p_g") ||
      contains(cfg.outputs, "p_ee") || contains(cfg.outputs, "p_eg") ||
      contains(cfg.outputs, "p_ge") || contains(cfg.outputs, "p_gg");
  const bool need_corr = contains(cfg.outputs, "c_ee") ||
                         contains(cfg.outputs, "c_eg") ||
                         contains(cfg.outputs, "c_gg");
  const bool need_rho = contains(cfg.outputs, "concurrence") ||
                        contains(cfg.outputs, "eof");

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = cfg.to_absolute_time(grid[i]);
    const DecoherenceProfile pr = decoherence_profile(cfg.params, t);
    PurityTriple mu{};
    if (need_purity) mu = purities(cfg.prep, cfg.params, t);
    AtomicProbabilities ap{};
    if (need_probs) ap = atomic_probabilities(cfg.prep, cfg.params, t);
    CorrelationFunctions cf{};
    if (need_corr) cf = correlation_functions(cfg.prep, cfg.params, t);
    double conc = 0.0;
    if (need_rho) conc = concurrence(atomic_reduced_analytic(cfg.prep, cfg.params, t));

    for (std::size_t j = 1; j < cols.size(); ++j) {
      const std::string& name = cols[j].name;
      double v = 0.0;
      if (name == "f1") v = pr.f1;
      else if (name == "f2") v = pr.f2;
      else if (name == "alpha_abs") v = std::abs(pr.alpha);
      else if (name == "mean_n") v = mean_photon_analytic(cfg.prep, cfg.params, t);
      else if (name == "purity_whole") v = mu.whole;
      else if (name == "purity_field") v = mu.field;
      else if (name == "purity_atoms") v = mu.atoms;
      else if (name == "concurrence") v = conc;
      else if (name == "eof") v = entanglement_of_formation(conc);
      else if (name == "p_e") v = ap.p_e;
      else if (name == "p_g") v = ap.p_g;
      else if (name == "p_ee") v = ap.p_ee;
      else if (name == "p_eg") v = ap.p_eg;
      else if (name == "p_ge") v = ap.p_ge;
      else if (name == "p_gg") v = ap.p_gg;
      else if (name == "c_ee") v = cf.c_ee;
      else if (name == "c_eg") v = cf.c_eg;
      else if (name == "c_gg") v = cf.c_gg;
      cols[j].values[i] = v;
    }
  }
  diag.put("evaluation", "closed_form");
  diag.put("time_points", static_cast<double>(grid.size()));
}

// Shared output evaluation for density-matrix snapshots (standard basis).
void fill_from_density(const ExperimentConfig& cfg, const Eigen::MatrixXcd& rho,
                       int n_max, std::size_t row, std::vector<Column>& cols) {
  const Eigen::Matrix4cd ra = partial_trace_field(rho, n_max);
  const JointProbs jp{ra(0, 0).real(), ra(1, 1).real(), ra(2, 2).real(),
                      ra(3, 3).real()};
  double c_ee = 0, c_eg = 0, c_gg = 0;
  const bool need_corr = contains(cfg.outputs, "c_ee") ||
                         contains(cfg.outputs, "c_eg") ||
                         contains(cfg.outputs, "c_gg");
  if (need_corr) correlations_from_joints(jp, c_ee, c_eg, c_gg);
  double conc = 0.0;
  const bool need_conc =
      contains(cfg.outputs, "concurrence") || contains(cfg.outputs, "eof");
  if (need_conc) conc = concurrence({ra, AtomicBasis::Standard});

  for (std::size_t j = 1; j < cols.size(); ++j) {
    const std::string& name = cols[j].name;
    double v = 0.0;
    if (name == "mean_n") {
      v = mean_photon_number(partial_trace_atoms(rho, n_max));
    } else if (name == "purity_whole") {
      v = purity(rho);
    } else if (name == "purity_field") {
      v = purity(partial_trace_atoms(rho, n_max));
    } else if (name == "purity_atoms") {
      v = purity(ra);
    } else if (name == "concurrence") {
      v = conc;
    } else if (name == "eof") {
      v = entanglement_of_formation(conc);
    } else if (name == "p_e") {
      v = jp.ee + jp.eg;
    } else if (name == "p_g") {
      v = jp.ge + jp.gg;
    } else if (name == "p_ee") {
      v = jp.ee;
    } else if (name == "p_eg") {
      v = jp.eg;
    } else if (name == "p_ge") {
      v = jp.ge;
    } else if (name == "p_gg") {
      v = jp.gg;
    } else if (name == "c_ee") {
      v = c_ee;
    } else if (name == "c_eg") {
      v = c_eg;
    } else if (name == "c_gg") {
      v = c_gg;
    }
    cols[j].values[row] = v;
  }
}

void reject_closed_form_outputs(const ExperimentConfig& cfg) {
  for (const char* name : {"f1", "f2", "alpha_abs"}) {
    if (contains(cfg.outputs, name)) {
      throw InvalidInput(std::string("output '") + name +
                         "' is a closed-form quantity; available only in "
                         "mode=analytic");
    }
  }
}

void run_oracle(const ExperimentConfig& cfg, std::vector<Column>& cols,
                RunDiagnostics& diag) {
  reject_closed_form_outputs(cfg);
  const int n_max = cfg.n_max > 0 ? cfg.n_max : cfg.params.default_n_max();
  const HamiltonianForm form = (cfg.oracle_form == "full")
                                   ? HamiltonianForm::FullInteraction
                                   : HamiltonianForm::EffectiveRwa;
  const Liouvillian liou = build_liouvillian(cfg.params, form, n_max);
  const double dt_target =
      cfg.oracle_dt > 0 ? cfg.oracle_dt : default_dt(cfg.params, liou);
  const StrideGrid grid = snap_grid(cfg, dt_target);

  const Eigen::VectorXcd psi0 = product_with_vacuum(cfg.prep, n_max);
  const TripartiteState rho0(psi0 * psi0.adjoint(), n_max, AtomicBasis::Standard);

  IntegratorConfig icfg;
  icfg.dt = grid.dt_gt;
  icfg.t_end = grid.t_end_gt;
  icfg.record_stride = grid.stride;

  std::size_t row = 0;
  const IntegrationStats stats =
      integrate(rho0, liou, icfg, [&](double, const Eigen::MatrixXcd& rho) {
        if (row < cols.front().values.size()) {
          fill_from_density(cfg, rho, n_max, row, cols);
        }
        ++row;
      });
  if (row != cols.front().values.size()) {
    throw NumericalGuard("integrator produced " + std::to_string(row) +
                         " records, expected " +
                         std::to_string(cols.front().values.size()));
  }
  diag.put("n_max", static_cast<double>(n_max));
  diag.put("dt_gt", grid.dt_gt);
  diag.put("steps", static_cast<double>(stats.steps));
  diag.put("max_trace_drift", stats.max_trace_drift);
  diag.put("max_ceiling_population", stats.max_ceiling_population);
}

void run_mcwf(const ExperimentConfig& cfg, std::vector<Column>& cols,
              RunDiagnostics& diag) {
  reject_closed_form_outputs(cfg);
  static const std::set<std::string> supported = {"mean_n", "p_e", "p_g", "eof",
                                                  "concurrence"};
  for (const auto& name : cfg.outputs) {
    if (!supported.count(name)) {
      throw InvalidInput("output '" + name +
                         "' is not a trajectory-average observable; mode=mcwf "
                         "supports mean_n, p_e, p_g, eof, concurrence");
    }
  }
  const int n_max = cfg.n_max > 0 ? cfg.n_max : cfg.params.default_n_max();
  const double dt_target =
      cfg.mcwf_dt > 0 ? cfg.mcwf_dt : default_mcwf_dt(cfg.params, n_max);
  const StrideGrid grid = snap_grid(cfg, dt_target);

  McwfConfig mc;
  mc.params = cfg.params;
  mc.n_traj = cfg.mcwf_n_traj;
  mc.seed = cfg.mcwf_seed;
  mc.dt = grid.dt_gt;
  mc.t_end = grid.t_end_gt;
  mc.record_stride = grid.stride;
  mc.n_max = n_max;
  mc.threads = cfg.mcwf_threads;

  const TrajectoryEnsemble ens =
      run_ensemble(product_with_vacuum(cfg.prep, n_max), mc);
  if (ens.times.size() != cols.front().values.size()) {
    throw NumericalGuard("trajectory recorder produced " +
                         std::to_string(ens.times.size()) +
                         " records, expected " +
                         std::to_string(cols.front().values.size()));
  }
  const ObservableSeries obs = ensemble_observables(ens);
  for (std::size_t i = 0; i < ens.times.size(); ++i) {
    for (std::size_t j = 1; j < cols.size(); ++j) {
      const std::string& name = cols[j].name;
      double v = 0.0;
      if (name == "mean_n") v = obs.mean_n[i];
      else if (name == "p_e") v = obs.p_e[i];
      else if (name == "p_g") v = obs.p_g[i];
      else if (name == "eof") v = obs.eof[i];
      else if (name == "concurrence")
        v = concurrence({obs.atomic_rho[i], AtomicBasis::Standard});
      cols[j].values[i] = v;
    }
  }
  diag.put("rng", "philox4x32-10");
  diag.put("seed", std::to_string(cfg.mcwf_seed));
  diag.put("n_traj", static_cast<double>(ens.n_traj));
  diag.put("n_max", static_cast<double>(n_max));
  diag.put("dt_gt", grid.dt_gt);
  diag.put("max_delta_p", ens.max_delta_p);
  diag.put("max_norm_residual", ens.max_norm_residual);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (cfg.mode == "figure") {
    const FigureResult fr = emit_figure(cfg.figure_id, out_dir);
    return {fr.files};
  }

  std::vector<Column> cols = make_columns(cfg);
  RunDiagnostics diag;
  if (cfg.mode == "analytic") {
    run_analytic(cfg, cols, diag);
  } else if (cfg.mode == "oracle") {
    run_oracle(cfg, cols, diag);
  } else if (cfg.mode == "mcwf") {
    run_mcwf(cfg, cols, diag);
  } else {
    throw InvalidInput("unknown mode '" + cfg.mode + "'");
  }

  const std::string base =
      cfg.out_base.empty() ? std::string("run") : cfg.out_base;
  const std::string csv = (fs::path(out_dir) / (base + ".csv")).string();
  const std::string json = (fs::path(out_dir) / (base + ".json")).string();
  ExperimentConfig recorded = cfg;
  recorded.out_base = base;
  write_csv(csv, cols);
  write_sidecar(json, recorded, diag);
  return {{csv, json}};
}

OracleComparison compare_oracle(const ExperimentConfig& cfg) {
  const int n_max = cfg.n_max > 0 ? cfg.n_max : cfg.params.default_n_max();
  const HamiltonianForm form = (cfg.oracle_form == "full")
                                   ? HamiltonianForm::FullInteraction
                                   : HamiltonianForm::EffectiveRwa;
  const Liouvillian liou = build_liouvillian(cfg.params, form, n_max);
  const double dt_target =
      cfg.oracle_dt > 0 ? cfg.oracle_dt : default_dt(cfg.params, liou);
  const StrideGrid grid = snap_grid(cfg, dt_target);

  const Eigen::VectorXcd psi0 = product_with_vacuum(cfg.prep, n_max);
  const TripartiteState rho0(psi0 * psi0.adjoint(), n_max, AtomicBasis::Standard);

  IntegratorConfig icfg;
  icfg.dt = grid.dt_gt;
  icfg.t_end = grid.t_end_gt;
  icfg.record_stride = grid.stride;

  OracleComparison cmp;
  cmp.tolerance = cfg.oracle_tolerance;
  cmp.times = cfg.time_grid();
  cmp.deviations.assign(cmp.times.size(), 0.0);
  cmp.dt_gt = grid.dt_gt;
  cmp.n_max = n_max;

  std::size_t row = 0;
  const IntegrationStats stats =
      integrate(rho0, liou, icfg, [&](double, const Eigen::MatrixXcd& rho) {
        if (row >= cmp.times.size()) return;
        const double t = cfg.to_absolute_time(cmp.times[row]);
        const TripartiteState ana =
            assemble_full_state(cfg.prep, cfg.params, t, n_max)
                .in_basis(AtomicBasis::Standard);
        cmp.deviations[row] = (ana.rho - rho).cwiseAbs().maxCoeff();
        ++row;
      });
  cmp.steps = stats.steps;
  cmp.max_deviation =
      *std::max_element(cmp.deviations.begin(), cmp.deviations.end());
  return cmp;
}

bool GoldenReport::all_matched() const {
  if (files.empty()) return false;
  for (const auto& f : files) {
    if (!f.matched) return false;
  }
  return true;
}

GoldenReport golden_check(const std::string& dir, const std::string& work_dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("golden directory '" + dir + "' does not exist");
  }
  std::vector<std::string> csvs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      csvs.push_back(entry.path().filename().string());
    }
  }
  std::sort(csvs.begin(), csvs.end());
  if (csvs.empty()) {
    throw IoError("no golden CSV files found in '" + dir + "'");
  }
  fs::create_directories(work_dir);

  GoldenReport report;
  std::set<std::string> reran;
  for (const auto& name : csvs) {
    GoldenFileResult r;
    r.csv = name;
    const fs::path golden_csv = fs::path(dir) / name;
    const fs::path sidecar = fs::path(golden_csv).replace_extension(".json");
    if (!fs::exists(sidecar)) {
      throw IoError("golden file '" + golden_csv.string() +
                    "' has no sidecar '" + sidecar.string() + "'");
    }
    const ExperimentConfig cfg = ExperimentConfig::from_file(sidecar.string());
    const std::string rerun_key =
        (cfg.mode == "figure") ? "figure:" + cfg.figure_id : "run:" + name;
    if (!reran.count(rerun_key)) {
      run_experiment(cfg, work_dir);
      reran.insert(rerun_key);
    }
    const fs::path fresh_csv = fs::path(work_dir) / name;
    if (!fs::exists(fresh_csv)) {
      r.matched = false;
      r.detail = "rerun did not regenerate this file";
      report.files.push_back(r);
      continue;
    }
    const std::string a = read_file_bytes(golden_csv.string());
    const std::string b = read_file_bytes(fresh_csv.string());
    if (a == b) {
      r.matched = true;
      r.detail = "byte-identical";
    } else if (cfg.mode == "mcwf" || cfg.figure_id == "fig8" ||
               cfg.figure_id == "fig9") {
      // Trajectory averages: tolerate last-bit formatting drift across
      // platforms while still catching real regressions.
      const auto ca = read_csv(golden_csv.string());
      const auto cb = read_csv(fresh_csv.string());
      double maxdev = 0.0;
      bool shape_ok = ca.size() == cb.size();
      for (std::size_t j = 0; shape_ok && j < ca.size(); ++j) {
        shape_ok = ca[j].name == cb[j].name &&
                   ca[j].values.size() == cb[j].values.size();
        if (!shape_ok) break;
        for (std::size_t i = 0; i < ca[j].values.size(); ++i) {
          maxdev = std::max(maxdev, std::abs(ca[j].values[i] - cb[j].values[i]));
        }
      }
      if (shape_ok && maxdev <= 1e-9) {
        r.matched = true;
        r.detail = "within 1e-9 (max deviation " + format_double(maxdev) + ")";
      } else {
        r.matched = false;
        r.detail = shape_ok ? "max deviation " + format_double(maxdev) +
                                  " exceeds 1e-9"
                            : "column layout changed";
      }
    } else {
      r.matched = false;
      r.detail = "byte mismatch";
    }
    report.files.push_back(r);
  }
  return report;
}

}  // namespace qcavity
