#pragma once

#include <cstdint>

namespace acamsim {

// Plain doubles with unit-bearing aliases. Every quantity in the library is
// SI: volts, amps, siemens, seconds.
using Volts = double;
using Amps = double;
using Siemens = double;
using Seconds = double;

// ============================================================================
// Memristor: bounded internal state with threshold-linear drift
// ============================================================================

/// Device constants for the behavioral memristor model. The state variable w
/// maps linearly onto conductance between g_off (w=0) and g_on (w=1), and w
/// drifts only while the applied voltage exceeds a polarity-dependent
/// threshold.
struct MemristorParams {
  Siemens g_off = 2e-6;
  Siemens g_on = 200e-6;
  Volts v_th_set = 0.5;
  Volts v_th_reset = -0.9;
  double k_set = 1e5;    ///< drift gain above v_th_set, 1/(V*s)
  double k_reset = 1e5;  ///< drift gain below v_th_reset, 1/(V*s)

  /// Throws std::invalid_argument unless 0 < g_off < g_on,
  /// v_th_reset < 0 < v_th_set, and both gains are positive.
  void validate() const;
};

/// One memristor: its constants plus the current state variable.
struct MemristorState {
  MemristorParams params{};
  double w = 0.0;  ///< in [0, 1]
};

/// Conductance seen between the device terminals for the given state.
[[nodiscard]] Siemens conductance(const MemristorState& m);

/// dw/dt for device voltage v: k_set*(v - v_th_set) above the set threshold,
/// k_reset*(v - v_th_reset) below the reset threshold, exactly zero between.
[[nodiscard]] double drift_rate(const MemristorParams& p, Volts v);

/// Advances w by one explicit Euler step under voltage v (OE terminal minus
/// AE terminal) for duration dt. Voltages strictly between the two thresholds
/// leave w untouched; the result is clamped to [0, 1].
/// Throws std::invalid_argument for non-finite v or non-positive/non-finite dt.
[[nodiscard]] MemristorState memristor_step(const MemristorState& m, Volts v, Seconds dt);

// ============================================================================
// NMOS transistor: long-channel square law, with an optional linear
// saturation variant
// ============================================================================

/// Saturation behavior selector. `quadratic` is the classic long-channel
/// square law. `linear` clamps the effective drain-source drop at the
/// velocity-saturation knee v_dsat, which makes the saturation current a
/// linear function of gate overdrive once the overdrive exceeds the knee.
enum class SaturationLaw : std::uint8_t { quadratic, linear };

struct TransistorParams {
  double k_prime = 500e-6;  ///< process transconductance, A/V^2
  double w_over_l = 4.0;    ///< geometry ratio
  Volts v_t = 0.3;          ///< gate threshold
  SaturationLaw law = SaturationLaw::quadratic;
  Volts v_dsat = 0.1;  ///< saturation knee, used only by SaturationLaw::linear

  void validate() const;
};

/// Drain current for gate-source voltage v_gs and drain-source voltage v_ds.
/// Cutoff below threshold, triode below the saturation point, constant
/// (quadratic law) or overdrive-linear (linear law) above it. Continuous in
/// both arguments across every region boundary.
/// Throws std::invalid_argument for non-finite inputs or v_ds < 0.
[[nodiscard]] Amps transistor_current(const TransistorParams& t, Volts v_gs, Volts v_ds);

// ============================================================================
// Ideal inverter
// ============================================================================

/// Ideal rail-to-rail inverter transfer: vdd - v_in.
/// Throws std::invalid_argument unless 0 <= v_in <= vdd.
[[nodiscard]] Volts inverter_out(Volts vdd, Volts v_in);

}  // namespace acamsim
