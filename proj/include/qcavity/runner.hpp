#pragma once

#include <string>
#include <vector>

#include "qcavity/config.hpp"

namespace qcavity {

struct RunResult {
  std::vector<std::string> files;  // paths written, CSV before sidecar
};

// Executes a config (any mode) and writes <out>.csv plus <out>.json into
// out_dir; figure mode writes the figure's whole file set. Returns the paths.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Entrywise comparison of the closed-form density matrix against the
// master-equation integrator on the config's time grid (standard basis,
// shared truncation).
struct OracleComparison {
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::vector<double> times;       // config time unit
  std::vector<double> deviations;  // per grid point
  long steps = 0;
  double dt_gt = 0.0;
  int n_max = 0;
  bool passed() const { return max_deviation <= tolerance; }
};
OracleComparison compare_oracle(const ExperimentConfig& cfg);

// Regenerates every CSV+sidecar pair found in dir (reruns happen in
// work_dir) and compares. Deterministic modes must match byte for byte;
// trajectory averages may instead match within 1e-9 per cell.
struct GoldenFileResult {
  std::string csv;
  bool matched = false;
  std::string detail;
};
struct GoldenReport {
  std::vector<GoldenFileResult> files;
  bool all_matched() const;
};
GoldenReport golden_check(const std::string& dir, const std::string& work_dir);

}  // namespace qcavity
