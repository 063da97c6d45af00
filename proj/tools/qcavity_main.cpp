#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "qcavity/config.hpp"
#include "qcavity/errors.hpp"
#include "qcavity/figures.hpp"
#include "qcavity/runner.hpp"
#include "qcavity/version.hpp"

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int dispatch(const CLI::App& app, const std::string& run_config,
             const std::string& run_out_dir, const std::string& fig_id,
             const std::string& fig_out_dir, bool fig_list,
             const std::string& golden_dir, const std::string& golden_work,
             const std::string& oc_config) {
  using namespace qcavity;
  const auto t0 = std::chrono::steady_clock::now();

  if (app.got_subcommand("run")) {
    const ExperimentConfig cfg = ExperimentConfig::from_file(run_config);
    const RunResult result = run_experiment(cfg, run_out_dir);
    for (const auto& f : result.files) std::cout << f << "\n";
    std::printf("done in %.2f s\n", seconds_since(t0));
    return kExitOk;
  }

  if (app.got_subcommand("figure")) {
    if (fig_list) {
      for (const auto& id : figure_ids()) {
        std::cout << id << "  " << figure_synopsis(id) << "\n";
      }
      return kExitOk;
    }
    if (fig_id.empty()) {
      throw InvalidInput("figure: provide an id or --list");
    }
    const FigureResult result = emit_figure(fig_id, fig_out_dir);
    for (const auto& f : result.files) std::cout << f << "\n";
    std::printf("done in %.2f s\n", seconds_since(t0));
    return kExitOk;
  }

  if (app.got_subcommand("golden-check")) {
    std::string work = golden_work;
    const bool scratch = work.empty();
    if (scratch) {
      work = (fs::temp_directory_path() /
              ("qcavity-golden-" + std::to_string(::getpid())))
                 .string();
    }
    const GoldenReport report = golden_check(golden_dir, work);
    for (const auto& f : report.files) {
      std::printf("[%s] %s: %s\n", f.matched ? "ok" : "mismatch",
                  f.csv.c_str(), f.detail.c_str());
    }
    if (scratch) {
      std::error_code ec;
      fs::remove_all(work, ec);
    }
    std::printf("%zu file(s) checked in %.2f s\n", report.files.size(),
                seconds_since(t0));
    return report.all_matched() ? kExitOk : kExitNumerical;
  }

  if (app.got_subcommand("oracle-compare")) {
    const ExperimentConfig cfg = ExperimentConfig::from_file(oc_config);
    const OracleComparison cmp = compare_oracle(cfg);
    std::printf("grid points        %zu\n", cmp.times.size());
    std::printf("n_max              %d\n", cmp.n_max);
    std::printf("dt (gt units)      %.6g\n", cmp.dt_gt);
    std::printf("integrator steps   %ld\n", cmp.steps);
    std::printf("max |entry diff|   %.6e\n", cmp.max_deviation);
    std::printf("tolerance          %.6e\n", cmp.tolerance);
    std::printf("runtime            %.2f s\n", seconds_since(t0));
    std::printf("%s\n", cmp.passed() ? "PASS" : "FAIL");
    return cmp.passed() ? kExitOk : kExitNumerical;
  }

  throw InvalidInput("no subcommand given; see --help");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven two-atom cavity dynamics: closed forms, a "
               "master-equation integrator, and quantum-jump averages"};
  app.set_version_flag("--version", qcavity::kVersion);
  app.require_subcommand(0, 1);

  std::string run_config, run_out_dir = ".";
  CLI::App* run = app.add_subcommand(
      "run", "execute a config file and write CSV plus JSON sidecar");
  run->add_option("config", run_config,
                  "flat key=value file or a previously written sidecar")
      ->required();
  run->add_option("-o,--out-dir", run_out_dir, "output directory");

  std::string fig_id, fig_out_dir = ".";
  bool fig_list = false;
  CLI::App* figure =
      app.add_subcommand("figure", "regenerate a published dataset by id");
  figure->add_option("id", fig_id, "dataset id (fig2..fig9)");
  figure->add_option("-o,--out-dir", fig_out_dir, "output directory");
  figure->add_flag("--list", fig_list, "list available ids");

  std::string golden_dir, golden_work;
  CLI::App* golden = app.add_subcommand(
      "golden-check", "rerun every CSV in a directory from its sidecar and compare");
  golden->add_option("dir", golden_dir, "directory of golden CSV+JSON pairs")
      ->required();
  golden->add_option("--work-dir", golden_work,
                     "where reruns are written (default: scratch dir)");

  std::string oc_config;
  CLI::App* oc = app.add_subcommand(
      "oracle-compare",
      "integrate the master equation and compare entrywise with the closed form");
  oc->add_option("config", oc_config, "config file supplying prep/params/grid")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qcavity::kExitConfig;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return qcavity::kExitOk;
  }

  try {
    return dispatch(app, run_config, run_out_dir, fig_id, fig_out_dir, fig_list,
                    golden_dir, golden_work, oc_config);
  } catch (const qcavity::InvalidInput& e) {
    std::fprintf(stderr, "error (input): %s\n", e.what());
    return qcavity::kExitConfig;
  } catch (const qcavity::NumericalGuard& e) {
    std::fprintf(stderr, "error (numerical): %s\n", e.what());
    return qcavity::kExitNumerical;
  } catch (const qcavity::IoError& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return qcavity::kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
