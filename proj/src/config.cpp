#include "qcavity/config.hpp"

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw InvalidInput("config key '" + key + "': cannot parse '" + value +
                       "' as a real number");
  }
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw InvalidInput("config key '" + key + "': cannot parse '" + value +
                       "' as an integer");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw InvalidInput("config key '" + key + "': cannot parse '" + value +
                       "' as an unsigned integer");
  }
  return static_cast<std::uint64_t>(x);
}

cxd parse_complex(const std::string& key, const std::string& value) {
  std::istringstream is(trim(value));
  cxd z;
  is >> z;
  if (is.fail()) {
    throw InvalidInput("config key '" + key + "': cannot parse '" + value +
                       "' as a complex number; use (re,im) or a bare real");
  }
  // Reject trailing junk after the complex literal.
  std::string rest;
  if (is >> rest && !rest.empty()) {
    throw InvalidInput("config key '" + key + "': trailing text '" + rest +
                       "' after complex value");
  }
  return z;
}

const std::set<std::string>& output_catalog() {
  static const std::set<std::string> names = {
      "f1",       "f2",       "alpha_abs",    "mean_n",      "purity_whole",
      "purity_field", "purity_atoms", "concurrence", "eof",
      "p_e",      "p_g",      "p_ee",         "p_eg",        "p_ge",
      "p_gg",     "c_ee",     "c_eg",         "c_gg"};
  return names;
}

std::string join(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mode",          "figure.id",     "prep",           "prep.c1",
      "prep.c2",       "prep.c3",       "prep.c4",        "params.g",
      "params.k",      "params.gamma",  "params.omega",   "params.delta",
      "time.unit",     "time.t_start",  "time.t_end",     "time.n_points",
      "outputs",       "oracle.form",   "oracle.dt",      "oracle.tolerance",
      "oracle.n_max",  "mcwf.n_traj",   "mcwf.seed",      "mcwf.dt",
      "mcwf.threads",  "mcwf.n_max",    "wigner.min",     "wigner.max",
      "wigner.n",      "wigner.outcome", "out"};
  return keys;
}

std::string file_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::pair<std::string, std::string>> pairs;
  const std::size_t first =
      text.find_first_not_of(" \t\r\n\f\v");
  if (first != std::string::npos && text[first] == '{') {
    // Sidecar JSON: the "config" object holds the flat key/value pairs.
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("config file '" + path + "': invalid JSON: " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw InvalidInput("config file '" + path +
                         "': JSON input must carry a \"config\" object");
    }
    for (const auto& item : j["config"].items()) {
      if (!item.value().is_string()) {
        throw InvalidInput("config key '" + item.key() +
                           "': sidecar values must be strings");
      }
      pairs.emplace_back(item.key(), item.value().get<std::string>());
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw InvalidInput("config file '" + path + "' line " +
                           std::to_string(lineno) +
                           ": expected 'key = value'");
      }
      pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  ExperimentConfig cfg = from_pairs(pairs);
  if (cfg.out_base.empty()) cfg.out_base = file_stem(path);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, std::string> kv;
  for (const auto& [key, value] : pairs) {
    if (!known_keys().count(key)) {
      throw InvalidInput("unknown config key '" + key +
                         "'; valid keys: " + join(known_keys()));
    }
    if (!kv.emplace(key, value).second) {
      throw InvalidInput("duplicate config key '" + key + "'");
    }
  }
  auto has = [&](const std::string& k) { return kv.count(k) != 0; };
  auto get = [&](const std::string& k) { return kv.at(k); };

  ExperimentConfig cfg;
  if (!has("mode")) throw InvalidInput("config is missing required key 'mode'");
  cfg.mode = trim(get("mode"));
  static const std::set<std::string> modes = {"analytic", "oracle", "mcwf",
                                              "figure"};
  if (!modes.count(cfg.mode)) {
    throw InvalidInput("config key 'mode': unknown mode '" + cfg.mode +
                       "'; valid modes: " + join(modes));
  }

  if (has("figure.id")) cfg.figure_id = trim(get("figure.id"));
  if (cfg.mode == "figure" && cfg.figure_id.empty()) {
    throw InvalidInput("mode=figure requires key 'figure.id'");
  }

  const bool any_c = has("prep.c1") || has("prep.c2") || has("prep.c3") ||
                     has("prep.c4");
  if (any_c) {
    if (has("prep")) {
      throw InvalidInput(
          "config keys 'prep' and 'prep.c1..c4' are mutually exclusive");
    }
    if (!(has("prep.c1") && has("prep.c2") && has("prep.c3") &&
          has("prep.c4"))) {
      throw InvalidInput(
          "explicit preparation requires all four keys prep.c1..c4");
    }
    AtomicPreparation prep;
    prep.c[0] = parse_complex("prep.c1", get("prep.c1"));
    prep.c[1] = parse_complex("prep.c2", get("prep.c2"));
    prep.c[2] = parse_complex("prep.c3", get("prep.c3"));
    prep.c[3] = parse_complex("prep.c4", get("prep.c4"));
    prep.validate();
    cfg.prep = prep;
    cfg.prep_label = "custom";
  } else if (has("prep")) {
    cfg.prep_label = trim(get("prep"));
    cfg.prep = AtomicPreparation::from_label(cfg.prep_label);
  }

  if (has("params.g")) cfg.params.g = parse_double("params.g", get("params.g"));
  if (has("params.k")) cfg.params.k = parse_double("params.k", get("params.k"));
  if (has("params.gamma"))
    cfg.params.gamma = parse_double("params.gamma", get("params.gamma"));
  if (has("params.omega"))
    cfg.params.omega = parse_double("params.omega", get("params.omega"));
  if (has("params.delta"))
    cfg.params.delta = parse_double("params.delta", get("params.delta"));
  cfg.params.validate();

  if (has("time.unit")) {
    cfg.time_unit = trim(get("time.unit"));
    if (cfg.time_unit != "kt" && cfg.time_unit != "gt") {
      throw InvalidInput("config key 'time.unit': expected 'kt' or 'gt', got '" +
                         cfg.time_unit + "'");
    }
  }
  if (has("time.t_start"))
    cfg.t_start = parse_double("time.t_start", get("time.t_start"));
  if (has("time.t_end"))
    cfg.t_end = parse_double("time.t_end", get("time.t_end"));
  if (has("time.n_points")) {
    const long long n = parse_int("time.n_points", get("time.n_points"));
    if (n < 2 || n > 10'000'000) {
      throw InvalidInput("config key 'time.n_points': need 2 <= n <= 1e7");
    }
    cfg.n_points = static_cast<int>(n);
  }
  if (cfg.t_start < 0.0 || !(cfg.t_end > cfg.t_start)) {
    throw InvalidInput("config time grid: need 0 <= t_start < t_end");
  }

  if (has("outputs")) {
    std::istringstream os(get("outputs"));
    std::string tok;
    while (std::getline(os, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      if (!output_catalog().count(tok)) {
        throw InvalidInput("config key 'outputs': unknown observable '" + tok +
                           "'; valid names: " + join(output_catalog()));
      }
      cfg.outputs.push_back(tok);
    }
  }
  if (cfg.mode != "figure" && cfg.outputs.empty()) {
    throw InvalidInput("mode=" + cfg.mode +
                       " requires key 'outputs' (comma-separated names)");
  }

  if (has("oracle.form")) {
    cfg.oracle_form = trim(get("oracle.form"));
    if (cfg.oracle_form != "rwa" && cfg.oracle_form != "full") {
      throw InvalidInput("config key 'oracle.form': expected 'rwa' or 'full'");
    }
  }
  if (has("oracle.dt")) {
    cfg.oracle_dt = parse_double("oracle.dt", get("oracle.dt"));
    if (cfg.oracle_dt < 0.0)
      throw InvalidInput("config key 'oracle.dt': must be >= 0");
  }
  if (has("oracle.tolerance")) {
    cfg.oracle_tolerance =
        parse_double("oracle.tolerance", get("oracle.tolerance"));
    if (!(cfg.oracle_tolerance > 0.0))
      throw InvalidInput("config key 'oracle.tolerance': must be > 0");
  }
  if (has("oracle.n_max") && has("mcwf.n_max")) {
    throw InvalidInput(
        "config keys 'oracle.n_max' and 'mcwf.n_max' are aliases; set one");
  }
  for (const char* key : {"oracle.n_max", "mcwf.n_max"}) {
    if (has(key)) {
      const long long n = parse_int(key, get(key));
      if (n != 0 && (n < 2 || n > 100'000)) {
        throw InvalidInput(std::string("config key '") + key +
                           "': need n = 0 (auto) or 2 <= n <= 1e5");
      }
      cfg.n_max = static_cast<int>(n);
    }
  }

  if (has("mcwf.n_traj")) {
    const long long n = parse_int("mcwf.n_traj", get("mcwf.n_traj"));
    if (n < 1 || n > 10'000'000)
      throw InvalidInput("config key 'mcwf.n_traj': need 1 <= n <= 1e7");
    cfg.mcwf_n_traj = static_cast<int>(n);
  }
  if (has("mcwf.seed")) cfg.mcwf_seed = parse_u64("mcwf.seed", get("mcwf.seed"));
  if (has("mcwf.dt")) {
    cfg.mcwf_dt = parse_double("mcwf.dt", get("mcwf.dt"));
    if (cfg.mcwf_dt < 0.0)
      throw InvalidInput("config key 'mcwf.dt': must be >= 0");
  }
  if (has("mcwf.threads")) {
    const long long n = parse_int("mcwf.threads", get("mcwf.threads"));
    if (n < 0 || n > 4096)
      throw InvalidInput("config key 'mcwf.threads': need 0 <= n <= 4096");
    cfg.mcwf_threads = static_cast<int>(n);
  }

  if (has("wigner.min"))
    cfg.wigner_min = parse_double("wigner.min", get("wigner.min"));
  if (has("wigner.max"))
    cfg.wigner_max = parse_double("wigner.max", get("wigner.max"));
  if (!(cfg.wigner_max > cfg.wigner_min)) {
    throw InvalidInput("config wigner window: need wigner.min < wigner.max");
  }
  if (has("wigner.n")) {
    const long long n = parse_int("wigner.n", get("wigner.n"));
    if (n < 2 || n > 4096)
      throw InvalidInput("config key 'wigner.n': need 2 <= n <= 4096");
    cfg.wigner_n = static_cast<int>(n);
  }
  if (has("wigner.outcome")) {
    cfg.wigner_outcome = trim(get("wigner.outcome"));
    static const std::set<std::string> outcomes = {"ee", "eg", "ge", "gg"};
    if (!outcomes.count(cfg.wigner_outcome)) {
      throw InvalidInput("config key 'wigner.outcome': expected one of " +
                         join(outcomes));
    }
  }

  if (has("out")) cfg.out_base = trim(get("out"));
  return cfg;
}

std::vector<std::pair<std::string, std::string>>
ExperimentConfig::resolved_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("mode", mode);
  if (mode == "figure") {
    // Figures are fully parameterized by their id; a minimal sidecar keeps
    // the rerun contract obvious.
    out.emplace_back("figure.id", figure_id);
    out.emplace_back("out", out_base);
    return out;
  }
  if (!figure_id.empty()) out.emplace_back("figure.id", figure_id);
  if (prep_label == "custom") {
    for (int i = 0; i < 4; ++i) {
      out.emplace_back("prep.c" + std::to_string(i + 1),
                       "(" + format_double(prep.c[i].real()) + "," +
                           format_double(prep.c[i].imag()) + ")");
    }
  } else {
    out.emplace_back("prep", prep_label);
  }
  out.emplace_back("params.g", format_double(params.g));
  out.emplace_back("params.k", format_double(params.k));
  out.emplace_back("params.gamma", format_double(params.gamma));
  out.emplace_back("params.omega", format_double(params.omega));
  out.emplace_back("params.delta", format_double(params.delta));
  out.emplace_back("time.unit", time_unit);
  out.emplace_back("time.t_start", format_double(t_start));
  out.emplace_back("time.t_end", format_double(t_end));
  out.emplace_back("time.n_points", std::to_string(n_points));
  if (!outputs.empty()) {
    std::string joined;
    for (const auto& o : outputs) {
      if (!joined.empty()) joined += ",";
      joined += o;
    }
    out.emplace_back("outputs", joined);
  }
  if (mode == "oracle") {
    out.emplace_back("oracle.form", oracle_form);
    out.emplace_back("oracle.dt", format_double(oracle_dt));
    out.emplace_back("oracle.tolerance", format_double(oracle_tolerance));
    out.emplace_back("oracle.n_max", std::to_string(n_max));
  }
  if (mode == "mcwf") {
    out.emplace_back("mcwf.n_traj", std::to_string(mcwf_n_traj));
    out.emplace_back("mcwf.seed", std::to_string(mcwf_seed));
    out.emplace_back("mcwf.dt", format_double(mcwf_dt));
    out.emplace_back("mcwf.threads", std::to_string(mcwf_threads));
    out.emplace_back("mcwf.n_max", std::to_string(n_max));
  }
  out.emplace_back("out", out_base);
  return out;
}

std::vector<double> ExperimentConfig::time_grid() const {
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  const double step = (t_end - t_start) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) grid[i] = t_start + step * i;
  grid.back() = t_end;
  return grid;
}

double ExperimentConfig::to_absolute_time(double t_in_unit) const {
  return (time_unit == "kt") ? t_in_unit / params.k : t_in_unit / params.g;
}

}  // namespace qcavity
