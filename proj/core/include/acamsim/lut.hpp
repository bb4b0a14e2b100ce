#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acamsim/comparator.hpp"
#include "acamsim/controller.hpp"
#include "acamsim/devices.hpp"

namespace acamsim {

// ============================================================================
// Programming lookup table: gate voltage <-> target conductance
// ============================================================================

/// One knot of the programming table.
struct LutEntry {
  Volts v_dlp = 0.0;
  Siemens g_mem = 0.0;
};

/// How a table's entries were obtained. The two analytic provenances differ
/// by which equation variant was tabulated; simulated tables come from full
/// programming episodes.
enum class LutProvenance : std::uint8_t { analytic_consistent, analytic_paper_literal, simulated };

enum class LutMethod : std::uint8_t { analytic, simulated };

/// Conductance predicted for a gate voltage, plus range markers relative to
/// the device's [g_off, g_on] span. The raw algebraic value is kept even when
/// flagged so identities between equation variants stay exactly assertable
/// (the compatibility variant goes negative at low gate drive by design).
struct ConductanceReading {
  Siemens value = 0.0;
  bool below_range = false;
  bool above_range = false;

  [[nodiscard]] bool in_range() const { return !below_range && !above_range; }
};

/// Order-sensitive 64-bit FNV-1a hash over every circuit and device parameter
/// a table depends on. Two tables with equal fingerprints were built for
/// interchangeable hardware assumptions.
[[nodiscard]] std::uint64_t params_fingerprint(const ComparatorParams& cmp,
                                               const MemristorParams& mem);

/// Conductance the feedback stop lands on when programming with gate voltage
/// v_dlp, by the closed-form boundary algebra. The consistent variant inverts
/// the same expression the programming boundary uses; paper_literal evaluates
/// the compatibility form, which sits exactly k_prime*(w_over_l)*(3/4)*v_read
/// below it at every voltage. Readings outside [g_off, g_on] are flagged, not
/// clamped. Throws std::invalid_argument unless 0 <= v_dlp <= v_set.
[[nodiscard]] ConductanceReading g_of_vdlp(const ComparatorParams& cmp,
                                           const MemristorParams& mem, Volts v_dlp,
                                           EquationVariant variant = EquationVariant::consistent);

/// Monotone programming table with its build diagnostics.
struct LutTable {
  std::vector<LutEntry> entries;
  LutProvenance provenance = LutProvenance::analytic_consistent;
  std::uint64_t fingerprint = 0;
  /// Grid points dropped from the ends during the build: below the usable
  /// range (no programming headroom) and above it (clipped at g_on).
  std::vector<LutEntry> trimmed_low;
  std::vector<LutEntry> trimmed_high;

  [[nodiscard]] Siemens g_min() const;
  [[nodiscard]] Siemens g_max() const;
  [[nodiscard]] Volts v_min() const;
  [[nodiscard]] Volts v_max() const;

  /// Throws std::invalid_argument unless entries are non-empty and strictly
  /// increasing in both voltage and conductance.
  void validate() const;
};

/// Default build grid: 64 uniform gate voltages over
/// [v_t + 0.05 V, v_set - 0.05 V], fine enough that piecewise-linear
/// inversion error stays well under the programming tolerance.
[[nodiscard]] std::vector<Volts> default_lut_grid(const ComparatorParams& cmp);

/// Builds a programming table over the given strictly-increasing gate-voltage
/// grid. analytic tabulates the closed-form boundary (in the chosen equation
/// variant); simulated runs a full programming episode per grid point on a
/// fresh cell and records where the feedback actually stopped. Out-of-range
/// and clipped end points are trimmed into the diagnostics fields. Throws
/// ConfigError when nothing usable remains.
[[nodiscard]] LutTable build_lut(const ControllerConfig& cfg, const MemristorParams& mem,
                                 const std::vector<Volts>& grid, LutMethod method,
                                 EquationVariant variant = EquationVariant::consistent);

/// Gate voltage that programs g_target, by piecewise-linear interpolation
/// between table knots (exact at knots). Throws OutOfRangeError when g_target
/// lies outside the table's conductance span.
[[nodiscard]] Volts vdlp_for_target(const LutTable& table, Siemens g_target);

/// Throws FingerprintError unless the table was built for exactly these
/// parameters.
void require_fingerprint(const LutTable& table, const ComparatorParams& cmp,
                         const MemristorParams& mem);

/// Writes the table as CSV: a fingerprint comment line, a provenance comment
/// line, the header `v_dlp_volts,g_mem_siemens`, then one row per entry.
void write_lut_csv(const LutTable& table, const std::string& path);

/// Reads a table written by write_lut_csv. Trim diagnostics are not part of
/// the format and come back empty. Throws ConfigError on malformed input.
[[nodiscard]] LutTable read_lut_csv(const std::string& path);

}  // namespace acamsim
