#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "acamsim/comparator.hpp"
#include "acamsim/devices.hpp"

namespace acamsim {

// ============================================================================
// Set/reset periphery and the three-phase programming controller
// ============================================================================

enum class PeripheryMode : std::uint8_t { idle, setting, resetting };

/// Decoded state of the set-reset periphery tile: which rail drives the
/// memristor's outer-electrode line and which drives the transistor-side line.
struct PeripheryState {
  PeripheryMode mode = PeripheryMode::idle;
  Volts v_sl_oe = 0.0;
  Volts v_sl_ae = 0.0;
};

/// Decodes the two periphery control lines. ctrl0 selects setting (outer
/// electrode high), ctrl1 selects resetting (transistor side high); both low
/// is idle. Throws InvalidControlError when both are asserted.
[[nodiscard]] PeripheryState periphery_from_ctrl(bool ctrl0, bool ctrl1,
                                                 const ComparatorParams& p);

/// Timing and rail configuration for programming episodes. One instance
/// describes the single programming circuit an array shares.
struct ControllerConfig {
  ComparatorParams comparator{};
  Seconds dt = 1e-8;
  Seconds t_max = 35e-6;
  /// Rail applied across the device once the stop comparator fires; its
  /// magnitude sits below both device thresholds, so conductance freezes.
  Volts v_stop = 0.4;
  /// Delay between the stop comparator firing and the periphery switchover.
  Seconds stop_latency = 0.0;
  /// Gate drive during reset episodes (well above the verify gate, so the
  /// transistor stays a strong pull-up throughout).
  Volts v_reset_gate = 2.2;
  /// Gate drive for verify-mode reads.
  Volts v_verify_gate = 1.9;

  /// Throws std::invalid_argument unless 0 < dt <= t_max, rails are positive,
  /// stop_latency is non-negative, and the comparator validates.
  void validate() const;
};

enum class ProgramOutcome : std::uint8_t { stopped_on_threshold, timed_out, reset_complete };

enum class ProgramPhase : std::uint8_t { prepare, drive, stop };

/// One logged instant of a programming episode.
struct TraceSample {
  Seconds t = 0.0;
  Volts v_out = 0.0;
  Volts v_mid = 0.0;
  Siemens g_mem = 0.0;
  PeripheryMode mode = PeripheryMode::idle;
};

/// Everything a programming episode produced. stop_time is the analog instant
/// the stop comparator fired (set episodes) or the device finished clearing
/// (reset episodes); final_g is the conductance once the periphery has
/// actually switched over, i.e. stop_latency after the firing. phases holds
/// (phase, start time) pairs in episode order; the prepare phase occupies
/// zero simulated time, so drive also starts at zero.
struct ProgramResult {
  std::vector<TraceSample> trace;
  std::optional<Seconds> stop_time;
  Siemens final_g = 0.0;
  std::vector<std::pair<ProgramPhase, Seconds>> phases;
  ProgramOutcome outcome = ProgramOutcome::timed_out;
  /// Gate drive at or below the transistor threshold: the device cannot
  /// program, reported distinctly from an ordinary timeout.
  bool no_drive = false;
  MemristorState final_state{};
};

/// Runs one set-programming episode against a single cell:
///   prepare (zero simulated time) -> drive at v_set with the gate held at
///   v_dlp, integrating the device each dt -> stop once the shared node rises
///   through v_dth, after which v_stop holds the device frozen for the rest
///   of the episode.
/// The trace covers the whole episode window at uniform dt spacing.
/// Throws std::invalid_argument if v_dlp is negative or above v_set.
[[nodiscard]] ProgramResult run_set(const MemristorState& cell, Volts v_dlp,
                                    const ControllerConfig& cfg);

/// Runs one reset episode: the periphery drives the transistor-side line high
/// with the gate at v_reset_gate, the device sees a negative voltage, and the
/// episode ends when w reaches zero (reset_complete) or t_max passes.
[[nodiscard]] ProgramResult run_reset(const MemristorState& cell, const ControllerConfig& cfg);

/// Stable lowercase names, for CSVs and reports.
[[nodiscard]] const char* periphery_mode_name(PeripheryMode m);
[[nodiscard]] const char* program_outcome_name(ProgramOutcome o);
[[nodiscard]] const char* program_phase_name(ProgramPhase p);

}  // namespace acamsim
