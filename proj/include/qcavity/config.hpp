#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcavity/model.hpp"
#include "qcavity/state.hpp"

namespace qcavity {

// Flat dotted-key experiment description. Accepted sources: a text file of
// `key = value` lines ('#' comments), or a previously emitted JSON sidecar
// (its "config" object holds the same pairs), so every sidecar is itself a
// valid config and reruns reproduce the CSV.
struct ExperimentConfig {
  std::string mode;  // analytic | oracle | mcwf | figure
  std::string figure_id;
  std::string prep_label = "gg";  // preset name or "custom"
  AtomicPreparation prep = AtomicPreparation::from_label("gg");
  ModelParams params;
  std::string time_unit = "kt";  // kt | gt
  double t_start = 0.0;
  double t_end = 10.0;
  int n_points = 201;
  std::vector<std::string> outputs;
  std::string oracle_form = "rwa";  // rwa | full
  double oracle_dt = 0.0;           // gt units, 0 = default rule
  double oracle_tolerance = 1e-6;   // oracle-compare pass threshold
  int n_max = 0;                    // 0 = truncation rule from params
  int mcwf_n_traj = 500;
  std::uint64_t mcwf_seed = 1;
  double mcwf_dt = 0.0;
  int mcwf_threads = 0;
  double wigner_min = -3.0, wigner_max = 3.0;
  int wigner_n = 41;
  std::string wigner_outcome = "gg";
  std::string out_base;  // output stem; default: config filename stem

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  // Canonically ordered resolved key/value pairs for the sidecar.
  std::vector<std::pair<std::string, std::string>> resolved_pairs() const;

  // Grid in the configured unit, then converted to absolute time.
  std::vector<double> time_grid() const;
  double to_absolute_time(double t_in_unit) const;
};

// 17-significant-digit, locale-independent float formatting shared by CSV
// and sidecar writers.
std::string format_double(double v);

}  // namespace qcavity
