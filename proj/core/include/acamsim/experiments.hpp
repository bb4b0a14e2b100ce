#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acamsim/array.hpp"
#include "acamsim/config.hpp"
#include "acamsim/controller.hpp"
#include "acamsim/lut.hpp"

namespace acamsim {

// ============================================================================
// Run reports
// ============================================================================

/// One named invariant or observation from a run. Informational entries set
/// passed = true unconditionally and put the substance in detail.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RunReport {
  std::vector<CheckResult> checks;

  void add(std::string name, bool passed, std::string detail);
  [[nodiscard]] bool all_passed() const;
};

/// Writes the report file: overall status, one line per named check, then the
/// full effective configuration, so every overridden parameter is on record.
void write_run_report(const RunReport& report, const ExperimentConfig& cfg,
                      const std::string& command, const std::string& path);

// ============================================================================
// Small numerics for sweep analysis
// ============================================================================

/// points evenly spaced values with exact endpoints; needs points >= 2, lo < hi.
[[nodiscard]] std::vector<double> make_linear_grid(double lo, double hi, int points);

struct PolyFit {
  std::vector<double> coeffs;  ///< ascending powers
  double r_squared = 0.0;
};

/// Least-squares polynomial fit via the normal equations. Degrees above 4 are
/// rejected (the normal-equation route is ill-conditioned beyond that).
[[nodiscard]] PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y,
                              int degree);

/// A half-open index window [begin, end) and the fit quality achieved on it.
struct FitRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  double r_squared = 0.0;
};

/// Longest contiguous window of at least degree + 2 points whose fit reaches
/// r2_min; among equally long windows the earliest wins. nullopt if none do.
[[nodiscard]] std::optional<FitRange> largest_fit_range(const std::vector<double>& x,
                                                        const std::vector<double>& y, int degree,
                                                        double r2_min);

// ============================================================================
// Programming sweep primitive
// ============================================================================

/// One grid point of a programming sweep.
struct SweepRow {
  Volts v_dl = 0.0;
  Siemens final_g = 0.0;
  std::optional<Seconds> stop_time;
  ProgramOutcome outcome = ProgramOutcome::timed_out;
  bool no_drive = false;
};

/// Runs one set episode per grid voltage, each on a fresh fully-reset cell.
[[nodiscard]] std::vector<SweepRow> run_programming_sweep(const ExperimentConfig& cfg,
                                                          const std::vector<Volts>& grid);

// ============================================================================
// Array job descriptions
// ============================================================================

/// One line of an array job: program a single device, program both devices of
/// a cell to a window, or flag a cell as matching everything.
struct JobOp {
  enum class Kind : std::uint8_t { write, window, dont_care };

  Kind kind = Kind::write;
  int row = 0;
  int col = 0;
  CellSide side = CellSide::lb;  ///< write only
  Siemens g = 0.0;               ///< write target
  Siemens g_lo = 0.0;            ///< window lower target
  Siemens g_hi = 0.0;            ///< window upper target
};

/// The built-in demonstration: four non-overlapping two-column words.
[[nodiscard]] std::vector<JobOp> default_demo_job();

/// Parses a job file: one op per line —
///   write <row> <col> <lb|hb> <g_siemens>
///   window <row> <col> <g_lo_siemens> <g_hi_siemens>
///   dont_care <row> <col>
/// with '#' comments and blank lines ignored. Throws ConfigError on any
/// malformed line, naming the file and line number.
[[nodiscard]] std::vector<JobOp> parse_job_file(const std::string& path);

// ============================================================================
// Commands: orchestrate, emit CSVs plus run_report.txt, return exit status
// ============================================================================

int cmd_cell_sweep(const ExperimentConfig& cfg);
int cmd_build_lut(const ExperimentConfig& cfg);
int cmd_array_demo(const ExperimentConfig& cfg);
int cmd_search_demo(const ExperimentConfig& cfg);

/// Single programming episode; exactly one of v_dlp / g_target must be given
/// (targets go through an analytic table). initial_w must lie in [0, 1].
int cmd_set_single(const ExperimentConfig& cfg, std::optional<Volts> v_dlp,
                   std::optional<Siemens> g_target, double initial_w);

/// Single reset episode from initial_w.
int cmd_reset_single(const ExperimentConfig& cfg, double initial_w);

}  // namespace acamsim
