#include "qcavity/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qcavity/errors.hpp"
#include "qcavity/version.hpp"

namespace qcavity {

void write_csv(const std::string& path, const std::vector<Column>& columns) {
  if (columns.empty()) throw InvalidInput("write_csv: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) {
      throw InvalidInput("write_csv: column '" + c.name +
                         "' has mismatched length");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out << ',';
    out << columns[j].name;
  }
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out << ',';
      out << format_double(columns[j].values[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void RunDiagnostics::put(const std::string& key, double value) {
  entries[key] = format_double(value);
}

void RunDiagnostics::put(const std::string& key, const std::string& value) {
  entries[key] = value;
}

void write_sidecar(const std::string& path, const ExperimentConfig& cfg,
                   const RunDiagnostics& diag) {
  nlohmann::ordered_json j;
  j["library"] = "qcavity";
  j["version"] = kVersion;
  nlohmann::ordered_json conf = nlohmann::ordered_json::object();
  for (const auto& [key, value] : cfg.resolved_pairs()) conf[key] = value;
  j["config"] = conf;
  nlohmann::ordered_json d = nlohmann::ordered_json::object();
  for (const auto& [key, value] : diag.entries) d[key] = value;
  j["diagnostics"] = d;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Column> read_csv(const std::string& path) {
  std::istringstream in(read_file_bytes(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<Column> cols;
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) cols.push_back({name, {}});
  }
  if (cols.empty()) throw IoError("CSV '" + path + "' has no header");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(ls, cell, ',')) {
      if (j >= cols.size()) {
        throw IoError("CSV '" + path + "': row has too many cells");
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw IoError("CSV '" + path + "': cell '" + cell + "' is not numeric");
      }
      cols[j].values.push_back(v);
      ++j;
    }
    if (j != cols.size()) {
      throw IoError("CSV '" + path + "': row has too few cells");
    }
  }
  return cols;
}

}  // namespace qcavity
