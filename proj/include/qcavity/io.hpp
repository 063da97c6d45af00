#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcavity/config.hpp"

namespace qcavity {

// One named column of a result table.
struct Column {
  std::string name;
  std::vector<double> values;
};

// Writes a CSV with a header row; every value is printed with 17 significant
// digits so reruns of the same binary are byte-identical.
void write_csv(const std::string& path, const std::vector<Column>& columns);

// Numerical diagnostics recorded next to each CSV.
struct RunDiagnostics {
  std::map<std::string, std::string> entries;
  void put(const std::string& key, double value);
  void put(const std::string& key, const std::string& value);
};

// Writes the JSON sidecar: library name/version, the fully resolved config
// (itself loadable as a config), and run diagnostics.
void write_sidecar(const std::string& path, const ExperimentConfig& cfg,
                   const RunDiagnostics& diag);

std::string read_file_bytes(const std::string& path);

// Parses a CSV produced by write_csv back into columns (for tolerance-based
// golden comparison of stochastic outputs).
std::vector<Column> read_csv(const std::string& path);

}  // namespace qcavity
