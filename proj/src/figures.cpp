#include "qcavity/figures.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "qcavity/analytic.hpp"
#include "qcavity/config.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/io.hpp"
#include "qcavity/mcwf.hpp"
#include "qcavity/metrics.hpp"

namespace fs = std::filesystem;

namespace qcavity {

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double step = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = a + step * i;
  v.back() = b;
  return v;
}

void emit_one(const std::string& out_dir, const std::string& stem,
              const std::string& id, const std::vector<Column>& cols,
              const RunDiagnostics& diag, FigureResult& fr) {
  ExperimentConfig cfg;
  cfg.mode = "figure";
  cfg.figure_id = id;
  cfg.out_base = stem;
  const std::string csv = (fs::path(out_dir) / (stem + ".csv")).string();
  const std::string json = (fs::path(out_dir) / (stem + ".json")).string();
  write_csv(csv, cols);
  write_sidecar(json, cfg, diag);
  fr.files.push_back(csv);
  fr.files.push_back(json);
}

// Purity relaxation curves of the vacuum-cavity ground-state preparation.
FigureResult emit_purity_family(const std::string& id, const std::string& out_dir,
                                bool whole) {
  const std::vector<double> ratios = {0.05, 0.2, 0.5, 2.0};
  const std::vector<double> kt = linspace(0.0, 10.0, 401);
  const AtomicPreparation prep = AtomicPreparation::from_label("gg");
  std::vector<Column> cols{{"kt", kt}};
  for (double r : ratios) {
    ModelParams p;
    p.g = r;
    p.k = 1.0;
    Column c{"gk_" + short_num(r), std::vector<double>(kt.size())};
    for (std::size_t i = 0; i < kt.size(); ++i) {
      const PurityTriple mu = purities(prep, p, kt[i] / p.k);
      c.values[i] = whole ? mu.whole : mu.field;
    }
    cols.push_back(std::move(c));
  }
  RunDiagnostics diag;
  diag.put("evaluation", "closed_form");
  diag.put("prep", "gg");
  FigureResult fr;
  emit_one(out_dir, id, id, cols, diag, fr);
  return fr;
}

FigureResult emit_correlation_surface(const std::string& out_dir) {
  const AtomicPreparation prep = AtomicPreparation::from_label("gg");
  std::vector<double> col_r, col_kt, col_cee, col_ceg, col_cgg;
  for (int j = 1; j <= 40; ++j) {
    ModelParams p;
    p.g = 0.05 * j;
    p.k = 1.0;
    for (int i = 1; i <= 200; ++i) {
      const double kt = 0.05 * i;
      const CorrelationFunctions cf = correlation_functions(prep, p, kt / p.k);
      col_r.push_back(p.g);
      col_kt.push_back(kt);
      col_cee.push_back(cf.c_ee);
      col_ceg.push_back(cf.c_eg);
      col_cgg.push_back(cf.c_gg);
    }
  }
  std::vector<Column> cols{{"g_over_k", col_r}, {"kt", col_kt},
                           {"c_ee", col_cee},   {"c_eg", col_ceg},
                           {"c_gg", col_cgg}};
  RunDiagnostics diag;
  diag.put("evaluation", "closed_form");
  diag.put("prep", "gg");
  FigureResult fr;
  emit_one(out_dir, "fig4", "fig4", cols, diag, fr);
  return fr;
}

FigureResult emit_eof_family(const std::string& out_dir) {
  const std::vector<double> ratios = {0.1, 0.5, 1.0, 5.0};
  const std::vector<double> gt = linspace(0.0, 3.0, 301);
  AtomicPreparation prep_a;
  prep_a.c << 1.0 / std::sqrt(2.0),
      std::polar(1.0 / std::sqrt(2.0), M_PI / 4.0), 0.0, 0.0;
  prep_a.validate();
  const AtomicPreparation prep_b = AtomicPreparation::from_label("phi+");

  FigureResult fr;
  const std::pair<const char*, AtomicPreparation> panels[] = {
      {"fig5a", prep_a}, {"fig5b", prep_b}};
  for (const auto& [stem, prep] : panels) {
    std::vector<Column> cols{{"gt", gt}};
    for (double r : ratios) {
      ModelParams p;
      p.g = r;
      p.k = 1.0;
      Column c{"gk_" + short_num(r), std::vector<double>(gt.size())};
      for (std::size_t i = 0; i < gt.size(); ++i) {
        const double t = gt[i] / p.g;
        c.values[i] =
            entanglement_of_formation(atomic_reduced_analytic(prep, p, t));
      }
      cols.push_back(std::move(c));
    }
    RunDiagnostics diag;
    diag.put("evaluation", "closed_form");
    diag.put("prep", stem == std::string("fig5a") ? "(phi+ + e^{i pi/4} phi-)/sqrt2"
                                                  : "phi+");
    emit_one(out_dir, stem, "fig5", cols, diag, fr);
  }
  return fr;
}

FigureResult emit_joint_population(const std::string& out_dir) {
  const std::vector<double> ratios = {0.1, 0.5, 1.0, 5.0};
  const std::vector<double> gt = linspace(0.0, 3.0, 301);
  const AtomicPreparation prep = AtomicPreparation::from_label("phi+");
  std::vector<Column> cols{{"gt", gt}};
  for (double r : ratios) {
    ModelParams p;
    p.g = r;
    p.k = 1.0;
    Column c{"gk_" + short_num(r), std::vector<double>(gt.size())};
    for (std::size_t i = 0; i < gt.size(); ++i) {
      c.values[i] = atomic_probabilities(prep, p, gt[i] / p.g).p_ee;
    }
    cols.push_back(std::move(c));
  }
  RunDiagnostics diag;
  diag.put("evaluation", "closed_form");
  diag.put("prep", "phi+");
  FigureResult fr;
  emit_one(out_dir, "fig6", "fig6", cols, diag, fr);
  return fr;
}

FigureResult emit_cat_wigner(const std::string& out_dir) {
  struct Panel {
    const char* stem;
    double ratio;
    JointOutcome outcome;
  };
  const Panel panels[] = {{"fig7a", 80.0, JointOutcome::ee},
                          {"fig7b", 40.0, JointOutcome::eg}};
  const std::vector<double> axis = linspace(-6.0, 6.0, 241);
  FigureResult fr;
  for (const Panel& panel : panels) {
    ModelParams p;
    p.g = panel.ratio;
    p.k = 1.0;
    const double t = 0.05 / p.k;  // kt = 0.05, the transient cat regime
    std::vector<double> col_x, col_y, col_w;
    col_x.reserve(axis.size() * axis.size());
    for (double x : axis) {
      for (double y : axis) {
        col_x.push_back(x);
        col_y.push_back(y);
        col_w.push_back(wigner_conditional(p, t, panel.outcome, cxd(x, y)));
      }
    }
    std::vector<Column> cols{{"re_beta", col_x}, {"im_beta", col_y},
                             {"wigner", col_w}};
    RunDiagnostics diag;
    diag.put("evaluation", "closed_form");
    diag.put("g_over_k", panel.ratio);
    diag.put("kt", 0.05);
    diag.put("outcome", joint_outcome_name(panel.outcome));
    emit_one(out_dir, panel.stem, "fig7", cols, diag, fr);
  }
  return fr;
}

struct EnsembleCurves {
  std::vector<double> mean_n, p_g, eof;
  double max_delta_p = 0.0;
};

EnsembleCurves run_figure_ensemble(const AtomicPreparation& prep,
                                   const ModelParams& params, double t_end_gt,
                                   int n_points, std::uint64_t seed) {
  const int n_max = params.default_n_max();
  const double dt_target = default_mcwf_dt(params, n_max);
  const double delta = t_end_gt / (n_points - 1);
  const int stride =
      std::max(1, static_cast<int>(std::ceil(delta / dt_target - 1e-12)));

  McwfConfig mc;
  mc.params = params;
  mc.n_traj = 500;
  mc.seed = seed;
  mc.dt = delta / stride;
  mc.t_end = t_end_gt;
  mc.record_stride = stride;
  mc.n_max = n_max;
  const TrajectoryEnsemble ens =
      run_ensemble(product_with_vacuum(prep, n_max), mc);
  const ObservableSeries obs = ensemble_observables(ens);
  return {obs.mean_n, obs.p_g, obs.eof, ens.max_delta_p};
}

// Trajectory-average relaxation against the strong-driving closed form for
// a family of drive strengths.
FigureResult emit_mcwf_drive_family(const std::string& out_dir) {
  const std::vector<double> omegas = {0.5, 1.0, 2.0, 20.0};
  const int n_points = 201;
  const double t_end = 10.0;
  const std::vector<double> gt = linspace(0.0, t_end, n_points);

  struct PanelPair {
    const char* prep_label;
    const char* stem_n;
    const char* stem_pg;
    int prep_index;
  };
  const PanelPair pairs[] = {{"phi+", "fig8a", "fig8b", 0},
                             {"phi-", "fig8c", "fig8d", 1}};
  FigureResult fr;
  for (const PanelPair& pp : pairs) {
    const AtomicPreparation prep = AtomicPreparation::from_label(pp.prep_label);
    std::vector<Column> cols_n{{"gt", gt}}, cols_pg{{"gt", gt}};
    RunDiagnostics diag;
    double max_dp = 0.0;
    for (std::size_t oi = 0; oi < omegas.size(); ++oi) {
      ModelParams p;
      p.g = 1.0;
      p.k = 1.0;
      p.omega = omegas[oi];
      const std::uint64_t seed = 8000 + 100 * pp.prep_index + oi;
      const EnsembleCurves curves =
          run_figure_ensemble(prep, p, t_end, n_points, seed);
      cols_n.push_back({"omega_" + short_num(omegas[oi]), curves.mean_n});
      cols_pg.push_back({"omega_" + short_num(omegas[oi]), curves.p_g});
      max_dp = std::max(max_dp, curves.max_delta_p);
      diag.put("seed.omega_" + short_num(omegas[oi]), std::to_string(seed));
    }
    // Strong-driving closed form, the dashed reference in the plots.
    ModelParams ref;
    ref.g = 1.0;
    ref.k = 1.0;
    Column ana_n{"closed_form", std::vector<double>(gt.size())};
    Column ana_pg{"closed_form", std::vector<double>(gt.size())};
    for (std::size_t i = 0; i < gt.size(); ++i) {
      ana_n.values[i] = mean_photon_analytic(prep, ref, gt[i] / ref.g);
      ana_pg.values[i] = atomic_probabilities(prep, ref, gt[i] / ref.g).p_g;
    }
    cols_n.push_back(std::move(ana_n));
    cols_pg.push_back(std::move(ana_pg));

    diag.put("rng", "philox4x32-10");
    diag.put("n_traj", 500.0);
    diag.put("prep", pp.prep_label);
    diag.put("max_delta_p", max_dp);
    emit_one(out_dir, pp.stem_n, "fig8", cols_n, diag, fr);
    emit_one(out_dir, pp.stem_pg, "fig8", cols_pg, diag, fr);
  }
  return fr;
}

// Entanglement protection of the dissipation-free preparation degrading
// with atomic spontaneous emission.
FigureResult emit_mcwf_decay_family(const std::string& out_dir) {
  const std::vector<double> gammas = {0.001, 0.01, 0.1};
  const int n_points = 101;
  const double t_end = 5.0;
  const std::vector<double> gt = linspace(0.0, t_end, n_points);
  const AtomicPreparation prep = AtomicPreparation::from_label("phi-");

  std::vector<Column> cols_n{{"gt", gt}}, cols_eof{{"gt", gt}};
  RunDiagnostics diag;
  double max_dp = 0.0;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    ModelParams p;
    p.g = 1.0;
    p.k = 1.0;
    p.omega = 20.0;
    p.gamma = gammas[gi];
    const std::uint64_t seed = 9000 + gi;
    const EnsembleCurves curves =
        run_figure_ensemble(prep, p, t_end, n_points, seed);
    cols_n.push_back({"gamma_" + short_num(gammas[gi]), curves.mean_n});
    cols_eof.push_back({"gamma_" + short_num(gammas[gi]), curves.eof});
    max_dp = std::max(max_dp, curves.max_delta_p);
    diag.put("seed.gamma_" + short_num(gammas[gi]), std::to_string(seed));
  }
  diag.put("rng", "philox4x32-10");
  diag.put("n_traj", 500.0);
  diag.put("prep", "phi-");
  diag.put("omega", 20.0);
  diag.put("max_delta_p", max_dp);
  FigureResult fr;
  emit_one(out_dir, "fig9a", "fig9", cols_n, diag, fr);
  emit_one(out_dir, "fig9b", "fig9", cols_eof, diag, fr);
  return fr;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig2", "fig3", "fig4", "fig5",
                                               "fig6", "fig7", "fig8", "fig9"};
  return ids;
}

std::string figure_synopsis(const std::string& id) {
  static const std::map<std::string, std::string> synopses = {
      {"fig2", "whole-system purity vs kt, ground preparation, four g/k"},
      {"fig3", "field purity vs kt, ground preparation, four g/k"},
      {"fig4", "joint-detection correlations vs kt and g/k (long format)"},
      {"fig5", "entanglement of formation vs gt for two preparations"},
      {"fig6", "double-excitation probability vs gt, phi+ preparation"},
      {"fig7", "conditioned-field Wigner maps in the transient cat regime"},
      {"fig8", "trajectory averages vs drive strength (500 trajectories)"},
      {"fig9", "entanglement decay under atomic emission (500 trajectories)"}};
  const auto it = synopses.find(id);
  return it == synopses.end() ? std::string() : it->second;
}

FigureResult emit_figure(const std::string& id, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (id == "fig2") return emit_purity_family("fig2", out_dir, true);
  if (id == "fig3") return emit_purity_family("fig3", out_dir, false);
  if (id == "fig4") return emit_correlation_surface(out_dir);
  if (id == "fig5") return emit_eof_family(out_dir);
  if (id == "fig6") return emit_joint_population(out_dir);
  if (id == "fig7") return emit_cat_wigner(out_dir);
  if (id == "fig8") return emit_mcwf_drive_family(out_dir);
  if (id == "fig9") return emit_mcwf_decay_family(out_dir);
  std::string msg = "unknown figure id '" + id + "'; available:";
  for (const auto& known : figure_ids()) {
    msg += "\n  " + known + "  " + figure_synopsis(known);
  }
  throw InvalidInput(msg);
}

}  // namespace qcavity
