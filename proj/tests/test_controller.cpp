#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "acamsim/controller.hpp"
#include "acamsim/errors.hpp"

using namespace acamsim;

namespace {

MemristorState fresh_cell(double w = 0.0) {
  MemristorState m;
  m.w = w;
  return m;
}

}  // namespace

TEST_SUITE("controller") {
  TEST_CASE("periphery decode covers all four control combinations") {
    const ComparatorParams p;
    const PeripheryState idle = periphery_from_ctrl(false, false, p);
    CHECK(idle.mode == PeripheryMode::idle);
    CHECK(idle.v_sl_oe == 0.0);
    CHECK(idle.v_sl_ae == 0.0);

    const PeripheryState setting = periphery_from_ctrl(true, false, p);
    CHECK(setting.mode == PeripheryMode::setting);
    CHECK(setting.v_sl_oe == p.v_set);
    CHECK(setting.v_sl_ae == 0.0);

    const PeripheryState resetting = periphery_from_ctrl(false, true, p);
    CHECK(resetting.mode == PeripheryMode::resetting);
    CHECK(resetting.v_sl_oe == 0.0);
    CHECK(resetting.v_sl_ae == p.v_set);

    CHECK_THROWS_AS(periphery_from_ctrl(true, true, p), InvalidControlError);
  }

  TEST_CASE("a set episode at the boundary gate stops on threshold near the target") {
    const ControllerConfig cfg;
    const Siemens target = 1e-4;
    const Volts v_dlp = vdlp_of_conductance(cfg.comparator, target);
    const ProgramResult r = run_set(fresh_cell(), v_dlp, cfg);

    CHECK(r.outcome == ProgramOutcome::stopped_on_threshold);
    CHECK_FALSE(r.no_drive);
    REQUIRE(r.stop_time.has_value());
    CHECK(*r.stop_time > 0.0);
    CHECK(*r.stop_time < cfg.t_max);
    CHECK(r.final_g == doctest::Approx(target).epsilon(0.02));

    REQUIRE(r.phases.size() == 3);
    CHECK(r.phases[0].first == ProgramPhase::prepare);
    CHECK(r.phases[0].second == 0.0);
    CHECK(r.phases[1].first == ProgramPhase::drive);
    CHECK(r.phases[1].second == 0.0);
    CHECK(r.phases[2].first == ProgramPhase::stop);
    // Zero stop latency: the periphery switches at the firing instant itself.
    CHECK(r.phases[2].second == *r.stop_time);
  }

  TEST_CASE("episode traces sample the full window at uniform spacing") {
    const ControllerConfig cfg;
    const ProgramResult r = run_set(fresh_cell(), vdlp_of_conductance(cfg.comparator, 1e-4), cfg);
    REQUIRE(r.trace.size() == 3501);  // 35 us at 10 ns plus the t=0 sample
    CHECK(r.trace[0].t == 0.0);
    CHECK(r.trace[0].g_mem == 2e-6);
    CHECK(r.trace[1].t == 1.0 * cfg.dt);
    CHECK(r.trace[1000].t == 1000.0 * cfg.dt);
    CHECK(r.trace.back().t == 3500.0 * cfg.dt);
  }

  TEST_CASE("before the stop the device only moves upward; after it nothing moves at all") {
    const ControllerConfig cfg;
    const ProgramResult r = run_set(fresh_cell(), vdlp_of_conductance(cfg.comparator, 1e-4), cfg);
    REQUIRE(r.outcome == ProgramOutcome::stopped_on_threshold);
    bool seen_stop = false;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const TraceSample& s = r.trace[i];
      if (s.mode == PeripheryMode::setting) {
        CHECK_FALSE(seen_stop);  // one contiguous drive phase, then the tail
        if (i > 0) {
          CHECK(r.trace[i].g_mem >= r.trace[i - 1].g_mem);
        }
      } else {
        seen_stop = true;
        // Stop configuration: output snapped low, weak reverse rail on the
        // shared node, conductance frozen bit-exactly at its final value.
        CHECK(s.v_out == 0.0);
        CHECK(s.v_mid == cfg.v_stop);
        CHECK(s.g_mem == r.final_g);
      }
    }
    CHECK(seen_stop);
  }

  TEST_CASE("a gate at or below the transistor threshold is reported as no-drive") {
    const ControllerConfig cfg;
    for (const Volts v : {0.25, 0.3}) {
      const ProgramResult r = run_set(fresh_cell(), v, cfg);
      CHECK(r.no_drive);
      CHECK(r.outcome == ProgramOutcome::timed_out);
      CHECK_FALSE(r.stop_time.has_value());
      CHECK(r.final_g == 2e-6);  // no programming current ever flowed
      CHECK(r.phases.size() == 2);
      // The open branch floats the shared node to the rail, which would look
      // like an instant stop if it were not filtered out.
      CHECK(r.trace[0].v_mid == doctest::Approx(cfg.comparator.v_set));
    }
  }

  TEST_CASE("an unreachable target drives the device to its rail and times out") {
    const ControllerConfig cfg;
    // Gate overdrive 0.7 V wants ~0.8 mS, four times the device maximum.
    const ProgramResult r = run_set(fresh_cell(), 1.0, cfg);
    CHECK(r.outcome == ProgramOutcome::timed_out);
    CHECK_FALSE(r.no_drive);
    CHECK_FALSE(r.stop_time.has_value());
    CHECK(r.final_state.w == 1.0);
    CHECK(r.final_g == doctest::Approx(2e-4));
  }

  TEST_CASE("halving the integration step moves the stopped conductance by well under a percent") {
    ControllerConfig cfg;
    const Volts v_dlp = vdlp_of_conductance(cfg.comparator, 1e-4);
    const ProgramResult coarse = run_set(fresh_cell(), v_dlp, cfg);
    cfg.dt = 5e-9;
    const ProgramResult fine = run_set(fresh_cell(), v_dlp, cfg);
    REQUIRE(coarse.outcome == ProgramOutcome::stopped_on_threshold);
    REQUIRE(fine.outcome == ProgramOutcome::stopped_on_threshold);
    CHECK(std::abs(coarse.final_g - fine.final_g) / fine.final_g <= 0.005);
  }

  TEST_CASE("stop latency delays the switchover and lets the device overshoot") {
    ControllerConfig cfg;
    const Volts v_dlp = vdlp_of_conductance(cfg.comparator, 1e-4);
    const ProgramResult instant = run_set(fresh_cell(), v_dlp, cfg);
    cfg.stop_latency = 5e-7;
    const ProgramResult delayed = run_set(fresh_cell(), v_dlp, cfg);

    REQUIRE(instant.stop_time.has_value());
    REQUIRE(delayed.stop_time.has_value());
    // The comparator fires at the same analog instant either way.
    CHECK(*delayed.stop_time == doctest::Approx(*instant.stop_time).epsilon(1e-6));
    // The periphery switches at the first sample past firing + latency.
    REQUIRE(delayed.phases.size() == 3);
    const Seconds deadline = *delayed.stop_time + cfg.stop_latency;
    CHECK(delayed.phases[2].second >= deadline - 1e-15);
    CHECK(delayed.phases[2].second <= deadline + cfg.dt + 1e-15);
    // Programming continued through the latency window.
    CHECK(delayed.final_g > instant.final_g);
  }

  TEST_CASE("set episodes reject gate voltages outside the rail range") {
    const ControllerConfig cfg;
    CHECK_THROWS_AS(run_set(fresh_cell(), -0.1, cfg), std::invalid_argument);
    CHECK_THROWS_AS(run_set(fresh_cell(), 1.9, cfg), std::invalid_argument);
  }

  TEST_CASE("a reset episode clears a fully set device well inside the window") {
    const ControllerConfig cfg;
    const ProgramResult r = run_reset(fresh_cell(1.0), cfg);
    CHECK(r.outcome == ProgramOutcome::reset_complete);
    REQUIRE(r.stop_time.has_value());
    CHECK(*r.stop_time > 5e-6);
    CHECK(*r.stop_time < cfg.t_max);
    CHECK(r.final_state.w == 0.0);
    CHECK(r.final_g == 2e-6);
    REQUIRE(r.phases.size() == 3);
    CHECK(r.phases[2].first == ProgramPhase::stop);
    CHECK(r.phases[2].second == *r.stop_time);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].g_mem <= r.trace[i - 1].g_mem);
      CHECK(r.trace[i].mode == PeripheryMode::resetting);
    }
  }

  TEST_CASE("resetting an already-cleared device completes immediately but still logs the window") {
    const ControllerConfig cfg;
    const ProgramResult r = run_reset(fresh_cell(0.0), cfg);
    CHECK(r.outcome == ProgramOutcome::reset_complete);
    REQUIRE(r.stop_time.has_value());
    CHECK(*r.stop_time == 0.0);
    CHECK(r.trace.size() == 3501);
    CHECK(r.final_g == 2e-6);
  }

  TEST_CASE("a half-set device clears faster than a fully set one") {
    const ControllerConfig cfg;
    const ProgramResult full = run_reset(fresh_cell(1.0), cfg);
    const ProgramResult half = run_reset(fresh_cell(0.5), cfg);
    REQUIRE(full.stop_time.has_value());
    REQUIRE(half.stop_time.has_value());
    CHECK(*half.stop_time < *full.stop_time);
  }

  TEST_CASE("controller configuration validation rejects each malformed knob") {
    ControllerConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.t_max = cfg.dt / 2.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.v_stop = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.v_stop = cfg.comparator.v_set;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.stop_latency = -1e-9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.v_reset_gate = cfg.comparator.transistor.v_t;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = ControllerConfig{};
    cfg.v_verify_gate = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
