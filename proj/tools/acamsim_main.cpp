// Command-line front end for the analog-CAM programming simulator. All the
// substance lives in the core library; this file only maps flags onto an
// ExperimentConfig and dispatches to the command functions.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acamsim/config.hpp"
#include "acamsim/experiments.hpp"

namespace {

using acamsim::ExperimentConfig;

/// Flags shared by every subcommand. Values are applied on top of whatever
/// --config loaded, so the command line always wins.
struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string job_file;
  double dt = 0.0;
  long long seed = -1;
  bool paper_literal = false;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--config", flags.config_path, "INI file with device/periphery parameters");
  cmd.add_option("--out", flags.out_dir, "Output directory for CSVs and the run report");
  cmd.add_option("--dt", flags.dt, "Integration step in seconds (overrides config)");
  cmd.add_option("--seed", flags.seed, "RNG seed for randomized probes");
  cmd.add_option("--job", flags.job_file, "Array job file (write/window/dont_care lines)");
  cmd.add_flag("--paper-literal", flags.paper_literal,
               "Also emit and check the offset compatibility variant of the boundary algebra");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = acamsim::load_config(flags.config_path);
  }
  if (!flags.out_dir.empty()) {
    cfg.out_dir = flags.out_dir;
  }
  if (!flags.job_file.empty()) {
    cfg.job_file = flags.job_file;
  }
  if (flags.dt > 0.0) {
    cfg.controller.dt = flags.dt;
  }
  if (flags.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(flags.seed);
  }
  if (flags.paper_literal) {
    cfg.paper_literal = true;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral simulator for feedback-programmed analog CAM cells"};
  app.require_subcommand(1);

  CommonFlags flags;

  CLI::App* sweep = app.add_subcommand(
      "cell-sweep", "Program one cell across a gate-voltage grid and fit the response");
  add_common_flags(*sweep, flags);

  CLI::App* lut = app.add_subcommand(
      "build-lut", "Build the target-to-voltage tables and their divergence report");
  add_common_flags(*lut, flags);

  CLI::App* demo = app.add_subcommand(
      "array-demo", "Program the built-in word set into the array and verify its windows");
  add_common_flags(*demo, flags);

  CLI::App* search = app.add_subcommand(
      "search", "Program the array, then fire randomized probes against an independent oracle");
  add_common_flags(*search, flags);

  CLI::App* set_cmd =
      app.add_subcommand("set", "Run a single feedback-stopped programming episode");
  add_common_flags(*set_cmd, flags);
  double set_vdlp = 0.0;
  double set_target = 0.0;
  double set_initial_w = 0.0;
  CLI::Option* vdlp_opt =
      set_cmd->add_option("--vdlp", set_vdlp, "Programming gate voltage in volts");
  CLI::Option* target_opt = set_cmd->add_option(
      "--target-g", set_target, "Conductance target in siemens (resolved through a table)");
  vdlp_opt->excludes(target_opt);
  set_cmd->add_option("--initial-w", set_initial_w, "Starting state variable in [0, 1]");

  CLI::App* reset_cmd = app.add_subcommand("reset", "Run a single reset episode");
  add_common_flags(*reset_cmd, flags);
  double reset_initial_w = 1.0;
  reset_cmd->add_option("--initial-w", reset_initial_w, "Starting state variable in [0, 1]");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve_config(flags);
    if (sweep->parsed()) {
      return acamsim::cmd_cell_sweep(cfg);
    }
    if (lut->parsed()) {
      return acamsim::cmd_build_lut(cfg);
    }
    if (demo->parsed()) {
      return acamsim::cmd_array_demo(cfg);
    }
    if (search->parsed()) {
      return acamsim::cmd_search_demo(cfg);
    }
    if (set_cmd->parsed()) {
      std::optional<double> v_dlp;
      std::optional<double> g_target;
      if (vdlp_opt->count() > 0) {
        v_dlp = set_vdlp;
      }
      if (target_opt->count() > 0) {
        g_target = set_target;
      }
      return acamsim::cmd_set_single(cfg, v_dlp, g_target, set_initial_w);
    }
    if (reset_cmd->parsed()) {
      return acamsim::cmd_reset_single(cfg, reset_initial_w);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
