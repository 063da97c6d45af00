#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_bin;
fs::path g_scratch;

struct CmdResult {
  int code;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = g_scratch / ("cmd" + std::to_string(counter++) + ".log");
  const std::string cmd =
      "\"" + g_bin + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// no doctest assertions here: this runs before any test context exists
struct Setup {
  Setup() {
    if (const char* bin = std::getenv("QCAVITY_BIN")) g_bin = bin;
    char tmpl[] = "/tmp/qcavity-cli-XXXXXX";
    if (mkdtemp(tmpl) != nullptr) g_scratch = tmpl;
  }
  ~Setup() {
    if (!g_scratch.empty()) fs::remove_all(g_scratch);
  }
};
Setup g_setup;  // doctest runs cases in one process, so tie scratch to it

}  // namespace

TEST_CASE("test environment provides the binary and a scratch directory") {
  REQUIRE_FALSE(g_bin.empty());
  REQUIRE_FALSE(g_scratch.empty());
  REQUIRE(fs::exists(g_bin));
}

TEST_CASE("version and help exit cleanly") {
  const CmdResult v = run_cli("--version");
  CHECK(v.code == 0);
  CHECK(v.output.find("0.1.0") != std::string::npos);

  const CmdResult help = run_cli("");
  CHECK(help.code == 0);
  CHECK(help.output.find("run") != std::string::npos);
}

TEST_CASE("analytic run emits a CSV and a rerunnable sidecar") {
  const fs::path cfg = g_scratch / "bell.cfg";
  spit(cfg,
       "mode = analytic\n"
       "prep = phi+\n"
       "params.g = 0.5\n"
       "params.k = 1\n"
       "time.unit = kt\n"
       "time.t_end = 2\n"
       "time.n_points = 11\n"
       "outputs = concurrence,eof\n");

  const fs::path out1 = g_scratch / "out1";
  const CmdResult r = run_cli("run \"" + cfg.string() + "\" -o \"" +
                              out1.string() + "\"");
  CHECK(r.code == 0);

  const std::string csv = slurp(out1 / "bell.csv");
  const auto rows = lines_of(csv);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == "kt,concurrence,eof");
  CHECK(rows[1] == "0,1,1");

  // the sidecar is itself a config; rerunning must reproduce the bytes
  const fs::path out2 = g_scratch / "out2";
  const CmdResult rr = run_cli("run \"" + (out1 / "bell.json").string() +
                               "\" -o \"" + out2.string() + "\"");
  CHECK(rr.code == 0);
  CHECK(slurp(out2 / "bell.csv") == csv);
}

TEST_CASE("configuration mistakes are reported as usage errors") {
  const fs::path bad_key = g_scratch / "bad_key.cfg";
  spit(bad_key, "mode = analytic\nparams.gee = 1\n");
  const CmdResult r1 = run_cli("run \"" + bad_key.string() + "\"");
  CHECK(r1.code == 2);
  CHECK(r1.output.find("params.gee") != std::string::npos);

  const fs::path bad_mode = g_scratch / "bad_mode.cfg";
  spit(bad_mode, "mode = simulate\n");
  const CmdResult r2 = run_cli("run \"" + bad_mode.string() + "\"");
  CHECK(r2.code == 2);
  CHECK(r2.output.find("analytic") != std::string::npos);  // lists the modes

  const CmdResult r3 = run_cli("run \"" + (g_scratch / "absent.cfg").string() + "\"");
  CHECK(r3.code == 4);

  const fs::path bad_prep = g_scratch / "bad_prep.cfg";
  spit(bad_prep,
       "mode = analytic\nprep = custom\nprep.c1 = 1\nprep.c2 = 1\n"
       "outputs = f1\n");
  const CmdResult r4 = run_cli("run \"" + bad_prep.string() + "\"");
  CHECK(r4.code == 2);

  // closed-form-only columns cannot come from the integrator
  const fs::path f1_oracle = g_scratch / "f1_oracle.cfg";
  spit(f1_oracle,
       "mode = oracle\ntime.t_end = 0.5\ntime.n_points = 3\noutputs = f1\n");
  const CmdResult r5 = run_cli("run \"" + f1_oracle.string() + "\"");
  CHECK(r5.code == 2);

  const CmdResult r6 = run_cli("figure fig99");
  CHECK(r6.code == 2);
  CHECK(r6.output.find("fig2") != std::string::npos);  // suggests valid ids
}

TEST_CASE("small integrator and trajectory runs emit consistent tables") {
  const fs::path oracle_cfg = g_scratch / "orc.cfg";
  spit(oracle_cfg,
       "mode = oracle\n"
       "prep = gg\n"
       "params.g = 0.2\n"
       "params.k = 1\n"
       "time.unit = kt\n"
       "time.t_end = 2\n"
       "time.n_points = 6\n"
       "oracle.n_max = 8\n"
       "outputs = mean_n,p_g\n");
  const fs::path orc_out = g_scratch / "orc_out";
  const CmdResult orc =
      run_cli("run \"" + oracle_cfg.string() + "\" -o \"" + orc_out.string() + "\"");
  CHECK(orc.code == 0);
  const auto orc_rows = lines_of(slurp(orc_out / "orc.csv"));
  REQUIRE(orc_rows.size() == 7);
  CHECK(orc_rows[0] == "kt,mean_n,p_g");

  const fs::path mcwf_cfg = g_scratch / "traj.cfg";
  spit(mcwf_cfg,
       "mode = mcwf\n"
       "prep = phi+\n"
       "params.g = 1\n"
       "params.k = 1\n"
       "params.omega = 2\n"
       "time.unit = gt\n"
       "time.t_end = 1\n"
       "time.n_points = 11\n"
       "mcwf.n_traj = 40\n"
       "mcwf.seed = 11\n"
       "mcwf.threads = 1\n"
       "mcwf.n_max = 6\n"
       "outputs = mean_n,p_g\n");
  const fs::path traj_out = g_scratch / "traj_out";
  const CmdResult traj =
      run_cli("run \"" + mcwf_cfg.string() + "\" -o \"" + traj_out.string() + "\"");
  CHECK(traj.code == 0);
  const auto traj_rows = lines_of(slurp(traj_out / "traj.csv"));
  REQUIRE(traj_rows.size() == 12);
  CHECK(traj_rows[0] == "gt,mean_n,p_g");

  // every cell parses as a finite double
  for (size_t i = 1; i < traj_rows.size(); ++i) {
    std::istringstream row(traj_rows[i]);
    std::string cell;
    int cells = 0;
    while (std::getline(row, cell, ',')) {
      size_t used = 0;
      const double v = std::stod(cell, &used);
      CHECK(used == cell.size());
      CHECK(std::isfinite(v));
      ++cells;
    }
    CHECK(cells == 3);
  }
}

TEST_CASE("golden-check verifies, detects corruption, and flags broken sets") {
  // build a small golden directory from the previous outputs
  const fs::path golden = g_scratch / "golden";
  fs::create_directories(golden);
  for (const char* name : {"bell.csv", "bell.json"}) {
    fs::copy_file(g_scratch / "out1" / name, golden / name);
  }
  for (const char* name : {"orc.csv", "orc.json"}) {
    fs::copy_file(g_scratch / "orc_out" / name, golden / name);
  }

  const fs::path work = g_scratch / "golden_work";
  const CmdResult ok = run_cli("golden-check \"" + golden.string() +
                               "\" --work-dir \"" + work.string() + "\"");
  CHECK(ok.code == 0);

  // flip one byte in a CSV cell
  std::string csv = slurp(golden / "bell.csv");
  const size_t pos = csv.find("0,1,1");
  REQUIRE(pos != std::string::npos);
  csv[pos + 2] = '2';
  spit(golden / "bell.csv", csv);
  const CmdResult corrupt = run_cli("golden-check \"" + golden.string() +
                                    "\" --work-dir \"" + work.string() + "\"");
  CHECK(corrupt.code == 3);
  CHECK(corrupt.output.find("bell.csv") != std::string::npos);

  // a CSV without its sidecar cannot be reproduced
  fs::remove(golden / "orc.json");
  const CmdResult broken = run_cli("golden-check \"" + golden.string() +
                                   "\" --work-dir \"" + work.string() + "\"");
  CHECK(broken.code == 4);

  const fs::path empty = g_scratch / "empty";
  fs::create_directories(empty);
  const CmdResult none = run_cli("golden-check \"" + empty.string() + "\"");
  CHECK(none.code == 4);
}

TEST_CASE("figure catalog lists ids and regenerates a small dataset") {
  const CmdResult list = run_cli("figure --list");
  CHECK(list.code == 0);
  for (const char* id :
       {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}) {
    CHECK(list.output.find(id) != std::string::npos);
  }

  const fs::path out = g_scratch / "figs";
  const CmdResult fig =
      run_cli("figure fig6 -o \"" + out.string() + "\"");
  CHECK(fig.code == 0);
  CHECK(fs::exists(out / "fig6.csv"));
  CHECK(fs::exists(out / "fig6.json"));
  const auto rows = lines_of(slurp(out / "fig6.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0].rfind("gt,", 0) == 0);
}

TEST_CASE("oracle comparison reports pass and fail through the exit code") {
  const fs::path cfg = g_scratch / "cmp.cfg";
  spit(cfg,
       "mode = oracle\n"
       "prep = phi-\n"
       "params.g = 0.2\n"
       "params.k = 1\n"
       "time.unit = kt\n"
       "time.t_end = 1\n"
       "time.n_points = 5\n"
       "oracle.n_max = 8\n"
       "outputs = mean_n\n");
  const CmdResult pass = run_cli("oracle-compare \"" + cfg.string() + "\"");
  CHECK(pass.code == 0);
  CHECK(pass.output.find("PASS") != std::string::npos);

  const fs::path strict = g_scratch / "cmp_strict.cfg";
  spit(strict,
       "mode = oracle\n"
       "prep = gg\n"
       "params.g = 0.2\n"
       "params.k = 1\n"
       "time.unit = kt\n"
       "time.t_end = 1\n"
       "time.n_points = 5\n"
       "oracle.n_max = 8\n"
       "oracle.tolerance = 1e-18\n"
       "outputs = mean_n\n");
  const CmdResult fail = run_cli("oracle-compare \"" + strict.string() + "\"");
  CHECK(fail.code == 3);
  CHECK(fail.output.find("FAIL") != std::string::npos);
}
