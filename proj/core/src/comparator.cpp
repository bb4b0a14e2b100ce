#include "acamsim/comparator.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

#include "acamsim/errors.hpp"

namespace acamsim {

namespace {

constexpr Amps kCurrentTol = 1e-12;  // 1 pA KCL residual
constexpr int kMaxBisectIters = 200;

void require_quadratic_law(const ComparatorParams& p, const char* what) {
  if (p.transistor.law != SaturationLaw::quadratic) {
    throw std::invalid_argument(std::string(what) +
                                " is defined for the quadratic saturation law only");
  }
}

void require_conductance(Siemens g) {
  if (!std::isfinite(g) || g < 0.0) {
    throw std::invalid_argument("conductance must be finite and non-negative");
  }
}

std::string format_si(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Bisection on a monotone residual over [lo, hi], in either orientation.
/// Stops once |residual| <= f_tol or the bracket narrows to x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double f_tol,
              double x_tol, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (std::abs(flo) <= f_tol) return lo;
  if (std::abs(fhi) <= f_tol) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw SolverError(std::string("no sign change bracketing ") + what);
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < kMaxBisectIters; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= f_tol || (hi - lo) <= x_tol) {
      return mid;
    }
    if ((fm > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  throw SolverError(std::string("bisection failed to converge on ") + what);
}

/// Shared body for the search and program branches, which differ only in the
/// rail feeding the memristor.
BranchSolution solve_pulldown_branch(const ComparatorParams& p, Siemens g_mem, Volts v_dl,
                                     Volts rail, const char* what) {
  require_conductance(g_mem);
  if (!std::isfinite(v_dl)) {
    throw std::invalid_argument("gate voltage must be finite");
  }
  const auto residual = [&](Volts v_mid) {
    return transistor_current(p.transistor, v_dl, v_mid) - g_mem * (rail - v_mid);
  };
  const Volts v_mid = bisect(residual, 0.0, rail, kCurrentTol, 1e-15, what);
  BranchSolution s;
  s.v_mid = v_mid;
  s.i_branch = g_mem * (rail - v_mid);
  s.v_out = inverter_out(rail, v_mid);
  return s;
}

}  // namespace

void ComparatorParams::validate() const {
  transistor.validate();
  if (!(v_read > 0.0) || !(v_read < v_set)) {
    throw std::invalid_argument("comparator rails need 0 < v_read < v_set");
  }
  if (!(v_dth > 0.0) || !(v_dth < v_set)) {
    throw std::invalid_argument("stop threshold needs 0 < v_dth < v_set");
  }
}

BranchSolution solve_search_branch(const ComparatorParams& p, Siemens g_mem, Volts v_dl) {
  return solve_pulldown_branch(p, g_mem, v_dl, p.v_read, "search-branch operating point");
}

BranchSolution solve_program_branch(const ComparatorParams& p, Siemens g_mem, Volts v_dl) {
  return solve_pulldown_branch(p, g_mem, v_dl, p.v_set, "program-branch operating point");
}

BranchSolution solve_reset_branch(const ComparatorParams& p, Siemens g_mem, Volts v_gate) {
  require_conductance(g_mem);
  if (!std::isfinite(v_gate)) {
    throw std::invalid_argument("gate voltage must be finite");
  }
  // Transistor drain sits on the v_set rail, source on the shared node; the
  // grounded memristor sinks the current.
  const auto residual = [&](Volts v_mid) {
    return transistor_current(p.transistor, v_gate - v_mid, p.v_set - v_mid) - g_mem * v_mid;
  };
  const Volts v_mid =
      bisect(residual, 0.0, p.v_set, kCurrentTol, 1e-15, "reset-branch operating point");
  BranchSolution s;
  s.v_mid = v_mid;
  s.i_branch = g_mem * v_mid;
  s.v_out = inverter_out(p.v_set, v_mid);
  return s;
}

Volts vdls_of_conductance(const ComparatorParams& p, Siemens g_mem, EquationVariant variant) {
  require_quadratic_law(p, "the search boundary closed form");
  require_conductance(g_mem);
  const Volts intercept =
      (variant == EquationVariant::consistent ? 0.25 * p.v_read : p.v_read) + p.transistor.v_t;
  const Volts v = g_mem / (p.transistor.k_prime * p.transistor.w_over_l) + intercept;
  if (v > p.v_read) {
    const Siemens g_max =
        (p.v_read - intercept) * p.transistor.k_prime * p.transistor.w_over_l;
    throw OutOfRangeError("search boundary " + format_si(v) + " V exceeds the " +
                          format_si(p.v_read) +
                          " V sweep rail; achievable conductance range is [0, " +
                          format_si(g_max > 0.0 ? g_max : 0.0) + "] S");
  }
  return v;
}

Volts vdls_of_conductance_solved(const ComparatorParams& p, Siemens g_mem) {
  require_conductance(g_mem);
  const Volts half = 0.5 * p.v_read;
  // v_mid falls monotonically as the gate drives harder, from v_read at
  // cutoff, so the residual starts positive.
  const auto residual = [&](Volts v_dl) {
    return solve_search_branch(p, g_mem, v_dl).v_mid - half;
  };
  if (residual(p.v_read) > 0.0) {
    throw OutOfRangeError(
        "no gate voltage within [0, " + format_si(p.v_read) +
        "] V brings the search branch to its midpoint for conductance " + format_si(g_mem) + " S");
  }
  return bisect(residual, 0.0, p.v_read, 0.0, 1e-7, "search boundary root");
}

Volts vdlp_of_conductance(const ComparatorParams& p, Siemens g_mem) {
  require_quadratic_law(p, "the program boundary closed form");
  require_conductance(g_mem);
  const double kwl = p.transistor.k_prime * p.transistor.w_over_l;
  const Volts v = p.transistor.v_t + std::sqrt(2.0 * (p.v_set - p.v_dth) * g_mem / kwl);
  if (v > p.v_set) {
    const Siemens g_max = (p.v_set - p.transistor.v_t) * (p.v_set - p.transistor.v_t) * kwl /
                          (2.0 * (p.v_set - p.v_dth));
    throw OutOfRangeError("program boundary " + format_si(v) + " V exceeds the rail " +
                          format_si(p.v_set) + " V; achievable conductance range is [0, " +
                          format_si(g_max) + "] S");
  }
  return v;
}

Volts vdlp_of_conductance_solved(const ComparatorParams& p, Siemens g_mem) {
  require_conductance(g_mem);
  const auto residual = [&](Volts v_dl) {
    return solve_program_branch(p, g_mem, v_dl).v_mid - p.v_dth;
  };
  if (residual(p.v_set) > 0.0) {
    throw OutOfRangeError("no gate voltage within [0, " + format_si(p.v_set) +
                          "] V brings the program branch to its stop point for conductance " +
                          format_si(g_mem) + " S");
  }
  return bisect(residual, 0.0, p.v_set, 0.0, 1e-7, "program boundary root");
}

Volts vdls_of_vdlp(const ComparatorParams& p, Volts v_dlp) {
  require_quadratic_law(p, "the boundary round-trip map");
  if (!std::isfinite(v_dlp) || v_dlp < p.transistor.v_t || v_dlp > p.v_set) {
    throw std::invalid_argument("v_dlp must lie within [v_t, v_set]");
  }
  const double ov = v_dlp - p.transistor.v_t;
  return ov * ov / (2.0 * (p.v_set - p.v_dth)) + 0.25 * p.v_read + p.transistor.v_t;
}

}  // namespace acamsim
