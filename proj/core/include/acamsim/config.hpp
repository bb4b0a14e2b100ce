#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "acamsim/controller.hpp"
#include "acamsim/devices.hpp"

namespace acamsim {

// ============================================================================
// Experiment configuration: INI-style file -> validated parameter bundle
// ============================================================================

enum class ExperimentKind : std::uint8_t { cell_sweep, build_lut, array_demo, search_demo };

[[nodiscard]] const char* experiment_kind_name(ExperimentKind k);
[[nodiscard]] ExperimentKind experiment_kind_from_name(const std::string& name);

/// Every knob an experiment run reads, with the ledger defaults baked in.
/// The controller field carries the comparator and transistor parameters.
struct ExperimentConfig {
  MemristorParams memristor{};
  ControllerConfig controller{};
  ExperimentKind kind = ExperimentKind::cell_sweep;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  /// Programming-sweep grid (inclusive endpoints at step spacing).
  Volts sweep_lo = 0.75;
  Volts sweep_hi = 1.8;
  Volts sweep_step = 0.05;

  /// Lookup-table grid. When lut_lo >= lut_hi (the default), the span derives
  /// from the live parameters as [v_t + 0.05 V, v_set - 0.05 V].
  Volts lut_lo = 0.0;
  Volts lut_hi = 0.0;
  int lut_points = 64;

  /// Window-sweep resolution: number of equal steps across [0, v_read].
  int window_sweep_steps = 128;

  /// Random search probes for the equivalence experiment.
  int probe_count = 1000;

  /// Evaluate the compatibility equation variant alongside the default one.
  bool paper_literal = false;

  /// Array program description; empty selects the built-in demonstration.
  std::string job_file;

  /// Throws (std::invalid_argument or ConfigError) unless every section
  /// validates and the grids are well-formed.
  void validate() const;
};

/// Parses an INI-style stream: `[section]` headers, `key = value` pairs,
/// `#`/`;` comment lines. Unknown sections or keys throw ConfigError naming
/// the offender and line; so do malformed values. Absent keys keep defaults.
/// origin labels the stream in error messages.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, const std::string& origin);

/// parse_config over a file. Throws ConfigError when the file cannot be read.
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Renders the full effective configuration in the same INI syntax the parser
/// accepts, deterministically ordered — the run report embeds this so every
/// override is visible.
[[nodiscard]] std::string echo_config(const ExperimentConfig& cfg);

}  // namespace acamsim
