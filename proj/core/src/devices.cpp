#include "acamsim/devices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acamsim {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string("non-finite ") + name);
  }
}

}  // namespace

void MemristorParams::validate() const {
  if (!(g_off > 0.0) || !(g_on > g_off)) {
    throw std::invalid_argument("memristor conductance bounds need 0 < g_off < g_on");
  }
  if (!(v_th_set > 0.0) || !(v_th_reset < 0.0)) {
    throw std::invalid_argument("memristor thresholds need v_th_reset < 0 < v_th_set");
  }
  if (!(k_set > 0.0) || !(k_reset > 0.0)) {
    throw std::invalid_argument("memristor drift gains must be positive");
  }
}

Siemens conductance(const MemristorState& m) {
  return m.params.g_off + m.w * (m.params.g_on - m.params.g_off);
}

double drift_rate(const MemristorParams& p, Volts v) {
  if (v > p.v_th_set) {
    return p.k_set * (v - p.v_th_set);
  }
  if (v < p.v_th_reset) {
    return p.k_reset * (v - p.v_th_reset);
  }
  return 0.0;
}

MemristorState memristor_step(const MemristorState& m, Volts v, Seconds dt) {
  require_finite(v, "voltage");
  require_finite(dt, "dt");
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  MemristorState next = m;
  next.w = std::clamp(m.w + drift_rate(m.params, v) * dt, 0.0, 1.0);
  return next;
}

void TransistorParams::validate() const {
  if (!(k_prime > 0.0) || !(w_over_l > 0.0)) {
    throw std::invalid_argument("transistor gain factors must be positive");
  }
  if (law == SaturationLaw::linear && !(v_dsat > 0.0)) {
    throw std::invalid_argument("linear saturation law needs v_dsat > 0");
  }
}

Amps transistor_current(const TransistorParams& t, Volts v_gs, Volts v_ds) {
  require_finite(v_gs, "v_gs");
  require_finite(v_ds, "v_ds");
  if (v_ds < 0.0) {
    throw std::invalid_argument("v_ds must be non-negative for this NMOS orientation");
  }

  const double v_ov = v_gs - t.v_t;
  if (v_ov <= 0.0) {
    return 0.0;
  }

  // The drain-source drop that actually matters is capped at the pinch-off
  // point, and under the linear law additionally at the velocity-saturation
  // knee. Evaluating the triode expression at the capped drop makes the
  // current continuous across every region boundary.
  double v_eff = std::min(v_ds, v_ov);
  if (t.law == SaturationLaw::linear) {
    v_eff = std::min(v_eff, t.v_dsat);
  }
  return t.k_prime * t.w_over_l * (v_ov * v_eff - 0.5 * v_eff * v_eff);
}

Volts inverter_out(Volts vdd, Volts v_in) {
  require_finite(vdd, "vdd");
  require_finite(v_in, "v_in");
  if (v_in < 0.0 || v_in > vdd) {
    throw std::invalid_argument("inverter input must lie within [0, vdd]");
  }
  return vdd - v_in;
}

}  // namespace acamsim
