#include "acamsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acamsim/errors.hpp"

namespace acamsim {

// ============================================================================
// Periphery decode
// ============================================================================

PeripheryState periphery_from_ctrl(bool ctrl0, bool ctrl1, const ComparatorParams& p) {
  if (ctrl0 && ctrl1) {
    throw InvalidControlError("periphery_from_ctrl: both control lines asserted");
  }
  PeripheryState s;
  if (ctrl0) {
    s.mode = PeripheryMode::setting;
    s.v_sl_oe = p.v_set;
    s.v_sl_ae = 0.0;
  } else if (ctrl1) {
    s.mode = PeripheryMode::resetting;
    s.v_sl_oe = 0.0;
    s.v_sl_ae = p.v_set;
  }
  return s;
}

// ============================================================================
// Controller configuration
// ============================================================================

void ControllerConfig::validate() const {
  comparator.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("ControllerConfig: dt must be positive and finite");
  }
  if (!(t_max >= dt) || !std::isfinite(t_max)) {
    throw std::invalid_argument("ControllerConfig: t_max must be at least dt");
  }
  if (!(v_stop > 0.0) || !(v_stop < comparator.v_set)) {
    throw std::invalid_argument(
        "ControllerConfig: v_stop must lie strictly between 0 and the program rail");
  }
  if (!(stop_latency >= 0.0) || !std::isfinite(stop_latency)) {
    throw std::invalid_argument("ControllerConfig: stop_latency must be non-negative");
  }
  if (!(v_reset_gate > comparator.transistor.v_t)) {
    throw std::invalid_argument(
        "ControllerConfig: v_reset_gate must exceed the transistor threshold");
  }
  if (!(v_verify_gate > comparator.transistor.v_t)) {
    throw std::invalid_argument(
        "ControllerConfig: v_verify_gate must exceed the transistor threshold");
  }
}

// ============================================================================
// Set-programming episode
// ============================================================================

namespace {

/// Number of integration steps covering [0, t_max] at spacing dt. The small
/// slack absorbs representation error when t_max is an exact multiple of dt.
std::size_t step_count(const ControllerConfig& cfg) {
  return static_cast<std::size_t>(std::floor(cfg.t_max / cfg.dt + 1e-9));
}

}  // namespace

ProgramResult run_set(const MemristorState& cell, Volts v_dlp, const ControllerConfig& cfg) {
  cfg.validate();
  cell.params.validate();
  const ComparatorParams& cmp = cfg.comparator;
  if (!std::isfinite(v_dlp) || v_dlp < 0.0 || v_dlp > cmp.v_set) {
    throw std::invalid_argument("run_set: v_dlp must lie in [0, v_set]");
  }

  ProgramResult res;
  res.phases.emplace_back(ProgramPhase::prepare, 0.0);

  // A gate at or below the transistor threshold leaves the pull-down branch
  // open: the shared node floats to the rail regardless of device state, so
  // the stop comparator would fire instantly while no programming current
  // flows. Report that as a distinct condition instead of a bogus stop event.
  res.no_drive = v_dlp <= cmp.transistor.v_t;

  const std::size_t n_steps = step_count(cfg);
  MemristorState state = cell;    // state at the current sample
  MemristorState prev_state = cell;
  Volts prev_v_mid = 0.0;
  Volts prev_v_dev = 0.0;         // device voltage used for the last step
  res.trace.reserve(n_steps + 1);

  bool crossed = false;           // stop comparator has fired
  Seconds cross_time = 0.0;       // interpolated firing instant
  double cross_theta = 0.0;       // fraction of the step preceding the firing
  bool switched = false;          // periphery has moved to the stop rail
  Seconds switch_time = 0.0;

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const Seconds t = static_cast<Seconds>(k) * cfg.dt;

    if (!switched) {
      const BranchSolution sol = solve_program_branch(cmp, conductance(state), v_dlp);

      if (!crossed && !res.no_drive && sol.v_mid >= cmp.v_dth) {
        crossed = true;
        if (k == 0) {
          cross_theta = 0.0;
          cross_time = 0.0;
        } else {
          cross_theta = 1.0;
          if (sol.v_mid > prev_v_mid) {
            cross_theta =
                std::clamp((cmp.v_dth - prev_v_mid) / (sol.v_mid - prev_v_mid), 0.0, 1.0);
          }
          cross_time = (static_cast<Seconds>(k - 1) + cross_theta) * cfg.dt;
        }
        res.stop_time = cross_time;
      }

      if (crossed && t >= cross_time + cfg.stop_latency) {
        switched = true;
        if (cfg.stop_latency == 0.0) {
          // The drive really ended at the firing instant inside the previous
          // step. Euler holds the drift rate constant across a step, so
          // rewinding to the partial step is exact for this integrator.
          switch_time = cross_time;
          if (k > 0) {
            state = prev_state;
            state.w = std::clamp(
                prev_state.w + drift_rate(state.params, prev_v_dev) * cross_theta * cfg.dt, 0.0,
                1.0);
          }
        } else {
          // Latency quantizes the switchover to the first sample at or past
          // the deadline; the device keeps programming until then.
          switch_time = t;
        }
      }
    }

    if (switched) {
      // Stop configuration: output snapped low, the weak reverse rail holds
      // the shared node, and the device sits below both drift thresholds.
      // Integrating the tail (rather than skipping it) keeps the freeze an
      // exercised claim instead of an assumed one.
      res.trace.push_back({t, 0.0, cfg.v_stop, conductance(state), PeripheryMode::resetting});
      if (k < n_steps) {
        state = memristor_step(state, -cfg.v_stop, cfg.dt);
      }
      continue;
    }

    const BranchSolution sol = solve_program_branch(cmp, conductance(state), v_dlp);
    res.trace.push_back({t, sol.v_out, sol.v_mid, conductance(state), PeripheryMode::setting});
    prev_state = state;
    prev_v_mid = sol.v_mid;
    prev_v_dev = cmp.v_set - sol.v_mid;
    if (k < n_steps) {
      state = memristor_step(state, prev_v_dev, cfg.dt);
    }
  }

  res.outcome = switched ? ProgramOutcome::stopped_on_threshold : ProgramOutcome::timed_out;
  res.final_state = state;
  res.final_g = conductance(state);

  res.phases.emplace_back(ProgramPhase::drive, 0.0);
  if (switched) {
    res.phases.emplace_back(ProgramPhase::stop, switch_time);
  }
  return res;
}

// ============================================================================
// Reset episode
// ============================================================================

ProgramResult run_reset(const MemristorState& cell, const ControllerConfig& cfg) {
  cfg.validate();
  cell.params.validate();
  const ComparatorParams& cmp = cfg.comparator;

  ProgramResult res;
  res.phases.emplace_back(ProgramPhase::prepare, 0.0);

  const std::size_t n_steps = step_count(cfg);
  MemristorState state = cell;
  res.trace.reserve(n_steps + 1);

  bool complete = state.w <= 0.0;
  Seconds complete_time = 0.0;
  if (complete) {
    res.stop_time = 0.0;
  }

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const Seconds t = static_cast<Seconds>(k) * cfg.dt;
    const BranchSolution sol = solve_reset_branch(cmp, conductance(state), cfg.v_reset_gate);
    res.trace.push_back({t, sol.v_out, sol.v_mid, conductance(state), PeripheryMode::resetting});
    if (complete || k == n_steps) {
      continue;  // cleared devices just log the settled tail
    }

    // The device hangs between the shared node and ground, so it sees the
    // node voltage with reversed polarity relative to set programming.
    const Volts v_dev = -sol.v_mid;
    const double w_before = state.w;
    state = memristor_step(state, v_dev, cfg.dt);
    if (state.w <= 0.0 && w_before > 0.0) {
      complete = true;
      const double rate = drift_rate(state.params, v_dev);
      double theta = 1.0;
      if (rate < 0.0) {
        theta = std::clamp(w_before / (-rate * cfg.dt), 0.0, 1.0);
      }
      complete_time = (static_cast<Seconds>(k) + theta) * cfg.dt;
      res.stop_time = complete_time;
    }
  }

  res.outcome = complete ? ProgramOutcome::reset_complete : ProgramOutcome::timed_out;
  res.final_state = state;
  res.final_g = conductance(state);

  res.phases.emplace_back(ProgramPhase::drive, 0.0);
  if (complete) {
    res.phases.emplace_back(ProgramPhase::stop, complete_time);
  }
  return res;
}

// ============================================================================
// Names
// ============================================================================

const char* periphery_mode_name(PeripheryMode m) {
  switch (m) {
    case PeripheryMode::idle:
      return "idle";
    case PeripheryMode::setting:
      return "setting";
    case PeripheryMode::resetting:
      return "resetting";
  }
  return "unknown";
}

const char* program_outcome_name(ProgramOutcome o) {
  switch (o) {
    case ProgramOutcome::stopped_on_threshold:
      return "stopped_on_threshold";
    case ProgramOutcome::timed_out:
      return "timed_out";
    case ProgramOutcome::reset_complete:
      return "reset_complete";
  }
  return "unknown";
}

const char* program_phase_name(ProgramPhase p) {
  switch (p) {
    case ProgramPhase::prepare:
      return "prepare";
    case ProgramPhase::drive:
      return "drive";
    case ProgramPhase::stop:
      return "stop";
  }
  return "unknown";
}

}  // namespace acamsim
