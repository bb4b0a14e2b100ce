#include "acamsim/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "acamsim/csv.hpp"
#include "acamsim/errors.hpp"

namespace acamsim {

namespace {

namespace fs = std::filesystem;

std::string format_si(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string out_path(const ExperimentConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  }
}

/// Composes the table grid the way the config documents it: an explicit
/// [lut_lo, lut_hi] span when given, otherwise the default span derived from
/// the live parameters (same rule as default_lut_grid, at lut_points).
std::vector<Volts> lut_grid_for(const ExperimentConfig& cfg) {
  const ComparatorParams& cmp = cfg.controller.comparator;
  const Volts lo = cfg.lut_lo < cfg.lut_hi ? cfg.lut_lo : cmp.transistor.v_t + 0.05;
  const Volts hi = cfg.lut_lo < cfg.lut_hi ? cfg.lut_hi : cmp.v_set - 0.05;
  return make_linear_grid(lo, hi, cfg.lut_points);
}

std::string outcome_field(const SweepRow& row) {
  return row.no_drive ? "no_drive" : program_outcome_name(row.outcome);
}

}  // namespace

// ============================================================================
// Run reports
// ============================================================================

void RunReport::add(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
}

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

void write_run_report(const RunReport& report, const ExperimentConfig& cfg,
                      const std::string& command, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  out << "# run report: " << command << "\n";
  out << "status: " << (report.all_passed() ? "PASS" : "FAIL") << "\n\n";
  out << "[checks]\n";
  for (const CheckResult& c : report.checks) {
    out << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " - " << c.detail << "\n";
  }
  out << "\n[effective-config]\n" << echo_config(cfg);
  out.flush();
  if (!out) {
    throw ConfigError("write to '" + path + "' failed");
  }
}

// ============================================================================
// Numerics
// ============================================================================

std::vector<double> make_linear_grid(double lo, double hi, int points) {
  if (points < 2) {
    throw std::invalid_argument("make_linear_grid: need at least two points");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("make_linear_grid: need finite lo < hi");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  if (degree < 0 || degree > 4) {
    throw std::invalid_argument("polyfit: degree must lie in [0, 4]");
  }
  const std::size_t n = x.size();
  if (n != y.size()) {
    throw std::invalid_argument("polyfit: x and y lengths differ");
  }
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (n < m) {
    throw std::invalid_argument("polyfit: need at least degree + 1 points");
  }

  // Normal equations A c = b with A[i][j] = sum x^(i+j), b[i] = sum y x^i.
  std::vector<double> pow_sums(2 * m - 1, 0.0);
  std::vector<double> b(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double p = 1.0;
    for (std::size_t i = 0; i < pow_sums.size(); ++i) {
      pow_sums[i] += p;
      if (i < m) {
        b[i] += y[k] * p;
      }
      p *= x[k];
    }
  }
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = pow_sums[i + j];
    }
  }

  // Gaussian elimination with partial pivoting.
  std::vector<double> c = b;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
        pivot = r;
      }
    }
    if (std::abs(a[pivot][col]) < 1e-30) {
      throw SolverError("polyfit: singular normal equations");
    }
    std::swap(a[col], a[pivot]);
    std::swap(c[col], c[pivot]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < m; ++j) {
        a[r][j] -= f * a[col][j];
      }
      c[r] -= f * c[col];
    }
  }
  for (std::size_t i = m; i-- > 0;) {
    for (std::size_t j = i + 1; j < m; ++j) {
      c[i] -= a[i][j] * c[j];
    }
    c[i] /= a[i][i];
  }

  double mean = 0.0;
  for (const double v : y) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double fit = 0.0;
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      fit += c[i] * p;
      p *= x[k];
    }
    ss_tot += (y[k] - mean) * (y[k] - mean);
    ss_res += (y[k] - fit) * (y[k] - fit);
  }

  PolyFit result;
  result.coeffs = std::move(c);
  if (ss_tot > 0.0) {
    result.r_squared = 1.0 - ss_res / ss_tot;
  } else {
    result.r_squared = ss_res <= 1e-20 ? 1.0 : 0.0;
  }
  return result;
}

std::optional<FitRange> largest_fit_range(const std::vector<double>& x,
                                          const std::vector<double>& y, int degree,
                                          double r2_min) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("largest_fit_range: x and y lengths differ");
  }
  const std::size_t n = x.size();
  const std::size_t min_len = static_cast<std::size_t>(degree) + 2;
  if (n < min_len) {
    return std::nullopt;
  }
  for (std::size_t len = n; len >= min_len; --len) {
    for (std::size_t begin = 0; begin + len <= n; ++begin) {
      const std::vector<double> xs(x.begin() + static_cast<std::ptrdiff_t>(begin),
                                   x.begin() + static_cast<std::ptrdiff_t>(begin + len));
      const std::vector<double> ys(y.begin() + static_cast<std::ptrdiff_t>(begin),
                                   y.begin() + static_cast<std::ptrdiff_t>(begin + len));
      const PolyFit fit = polyfit(xs, ys, degree);
      if (fit.r_squared >= r2_min) {
        return FitRange{begin, begin + len, fit.r_squared};
      }
    }
  }
  return std::nullopt;
}

// ============================================================================
// Programming sweep
// ============================================================================

std::vector<SweepRow> run_programming_sweep(const ExperimentConfig& cfg,
                                            const std::vector<Volts>& grid) {
  cfg.validate();
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const Volts v : grid) {
    MemristorState fresh;
    fresh.params = cfg.memristor;
    fresh.w = 0.0;
    const ProgramResult r = run_set(fresh, v, cfg.controller);
    rows.push_back({v, r.final_g, r.stop_time, r.outcome, r.no_drive});
  }
  return rows;
}

// ============================================================================
// Jobs
// ============================================================================

std::vector<JobOp> default_demo_job() {
  // Four words of length two: per-column (low-bound, high-bound) conductance
  // targets chosen to yield well-separated, non-overlapping match windows.
  const double u = 1e-6;
  std::vector<JobOp> job;
  const auto window = [&](int row, int col, double lo, double hi) {
    JobOp op;
    op.kind = JobOp::Kind::window;
    op.row = row;
    op.col = col;
    op.g_lo = lo * u;
    op.g_hi = hi * u;
    job.push_back(op);
  };
  window(0, 0, 10.0, 40.0);
  window(0, 1, 20.0, 50.0);
  window(1, 0, 60.0, 90.0);
  window(1, 1, 70.0, 100.0);
  window(2, 0, 110.0, 140.0);
  window(2, 1, 120.0, 150.0);
  window(3, 0, 160.0, 180.0);
  window(3, 1, 165.0, 185.0);
  return job;
}

std::vector<JobOp> parse_job_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read job file '" + path + "'");
  }
  std::vector<JobOp> job;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) -> void {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string word;
    if (!(row >> word) || word[0] == '#') {
      continue;
    }
    JobOp op;
    const auto read_int = [&](int& dst) {
      if (!(row >> dst)) {
        fail("expected an integer field");
      }
    };
    const auto read_g = [&](Siemens& dst) {
      if (!(row >> dst) || !std::isfinite(dst) || dst < 0.0) {
        fail("expected a non-negative conductance in siemens");
      }
    };
    if (word == "write") {
      op.kind = JobOp::Kind::write;
      read_int(op.row);
      read_int(op.col);
      std::string side;
      if (!(row >> side) || (side != "lb" && side != "hb")) {
        fail("expected side 'lb' or 'hb'");
      }
      op.side = side == "lb" ? CellSide::lb : CellSide::hb;
      read_g(op.g);
    } else if (word == "window") {
      op.kind = JobOp::Kind::window;
      read_int(op.row);
      read_int(op.col);
      read_g(op.g_lo);
      read_g(op.g_hi);
      if (!(op.g_lo <= op.g_hi)) {
        fail("window targets must satisfy g_lo <= g_hi");
      }
    } else if (word == "dont_care") {
      op.kind = JobOp::Kind::dont_care;
      read_int(op.row);
      read_int(op.col);
    } else {
      fail("unknown op '" + word + "' (expected write, window, or dont_care)");
    }
    std::string extra;
    if (row >> extra) {
      fail("unexpected trailing field '" + extra + "'");
    }
    job.push_back(op);
  }
  return job;
}

// ============================================================================
// Shared array-programming helper
// ============================================================================

namespace {

struct DeviceRef {
  CellAddress addr;
  Siemens target = 0.0;
};

/// Splits a job into wildcard flags (applied immediately) and the ordered
/// per-device write list.
std::vector<DeviceRef> stage_job(AcamArray& array, const std::vector<JobOp>& job) {
  std::vector<DeviceRef> writes;
  for (const JobOp& op : job) {
    switch (op.kind) {
      case JobOp::Kind::dont_care:
        array.set_dont_care(op.row, op.col, true);
        break;
      case JobOp::Kind::write:
        writes.push_back({{op.row, op.col, op.side}, op.g});
        break;
      case JobOp::Kind::window:
        writes.push_back({{op.row, op.col, CellSide::lb}, op.g_lo});
        writes.push_back({{op.row, op.col, CellSide::hb}, op.g_hi});
        break;
    }
  }
  return writes;
}

std::vector<std::uint64_t> state_snapshot(const AcamArray& array) {
  std::vector<std::uint64_t> bits;
  bits.reserve(static_cast<std::size_t>(array.rows() * array.cols() * 2));
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      bits.push_back(std::bit_cast<std::uint64_t>(array.cell(r, c).lb.w));
      bits.push_back(std::bit_cast<std::uint64_t>(array.cell(r, c).hb.w));
    }
  }
  return bits;
}

std::size_t device_flat_index(const AcamArray& array, const CellAddress& addr) {
  return (static_cast<std::size_t>(addr.row) * static_cast<std::size_t>(array.cols()) +
          static_cast<std::size_t>(addr.col)) *
             2 +
         (addr.side == CellSide::lb ? 0 : 1);
}

std::string device_label(const CellAddress& addr) {
  return "(row " + std::to_string(addr.row) + ", col " + std::to_string(addr.col) + ", " +
         (addr.side == CellSide::lb ? "lb" : "hb") + ")";
}

/// Runs every write, checking after each one that no device other than the
/// addressed one moved by even a single bit. Optionally logs one staircase
/// row per operation into per-device columns.
void program_writes(AcamArray& array, const LutTable& lut, const std::vector<DeviceRef>& writes,
                    RunReport& report, CsvFile* staircase) {
  const Seconds op_duration = 2.0 * array.controller().t_max;  // reset episode + set episode
  Seconds t = 0.0;

  const auto staircase_row = [&](Seconds at) {
    if (staircase == nullptr) {
      return;
    }
    std::vector<std::string> fields;
    fields.push_back(csv_num(at));
    for (int r = 0; r < array.rows(); ++r) {
      for (int c = 0; c < array.cols(); ++c) {
        fields.push_back(csv_num(conductance(array.cell(r, c).lb)));
        fields.push_back(csv_num(conductance(array.cell(r, c).hb)));
      }
    }
    staircase->row(fields);
  };

  staircase_row(0.0);
  bool isolation_ok = true;
  std::string isolation_detail =
      "non-addressed devices bit-identical across all " + std::to_string(writes.size()) +
      " operations";
  for (const DeviceRef& w : writes) {
    const std::vector<std::uint64_t> before = state_snapshot(array);
    array.write_cell(w.addr, w.target, lut);
    const std::vector<std::uint64_t> after = state_snapshot(array);
    const std::size_t addressed = device_flat_index(array, w.addr);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (i != addressed && before[i] != after[i]) {
        isolation_ok = false;
        isolation_detail = "device index " + std::to_string(i) + " moved while writing " +
                           device_label(w.addr);
      }
    }
    t += op_duration;
    staircase_row(t);
  }
  report.add("array.isolation", isolation_ok, isolation_detail);
}

std::vector<std::string> staircase_columns(const AcamArray& array) {
  std::vector<std::string> cols;
  cols.emplace_back("t");
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      const std::string base = "g_r" + std::to_string(r) + "c" + std::to_string(c);
      cols.push_back(base + "_lb");
      cols.push_back(base + "_hb");
    }
  }
  return cols;
}

/// Probes each row at its stored window centers and checks the match vector
/// equals what the stored windows predict: the probed row itself plus any
/// wildcard rows (exactly one-hot when the job programs full words only).
void check_center_probes(const AcamArray& array, RunReport& report, CsvFile* results_csv) {
  const std::vector<SearchWindow> stored = array.stored_windows();
  const auto window_at = [&](int r, int c) -> const SearchWindow& {
    return stored[static_cast<std::size_t>(r) * static_cast<std::size_t>(array.cols()) +
                  static_cast<std::size_t>(c)];
  };
  bool ok = true;
  std::string detail =
      "each word's center probe matched exactly the rows its stored windows predict "
      "(its own row, plus wildcard rows)";
  for (int r = 0; r < array.rows(); ++r) {
    std::vector<Volts> probe(static_cast<std::size_t>(array.cols()));
    for (int c = 0; c < array.cols(); ++c) {
      const SearchWindow& w = window_at(r, c);
      probe[static_cast<std::size_t>(c)] = 0.5 * (w.lo + w.hi);
    }
    const std::vector<bool> matches = array.search(probe);
    bool as_predicted = true;
    for (int rr = 0; rr < array.rows(); ++rr) {
      bool expect = true;
      for (int c = 0; c < array.cols(); ++c) {
        const SearchWindow& w = window_at(rr, c);
        const Volts v = probe[static_cast<std::size_t>(c)];
        if (!w.dont_care && (v < w.lo || v > w.hi)) {
          expect = false;
          break;
        }
      }
      if (rr == r && !expect) {
        as_predicted = false;  // a word must at least retrieve itself
      }
      if (matches[static_cast<std::size_t>(rr)] != expect) {
        as_predicted = false;
      }
    }
    if (!as_predicted && ok) {
      ok = false;
      detail = "probe at row " + std::to_string(r) +
               "'s window centers diverged from the stored-window prediction";
    }
    if (results_csv != nullptr) {
      std::vector<std::string> fields;
      fields.push_back(std::to_string(r));
      for (const Volts v : probe) {
        fields.push_back(csv_num(v));
      }
      for (int rr = 0; rr < array.rows(); ++rr) {
        fields.push_back(matches[static_cast<std::size_t>(rr)] ? "1" : "0");
      }
      fields.push_back(as_predicted ? "1" : "0");
      results_csv->row(fields);
    }
  }
  report.add("array.center_probes", ok, detail);
}

}  // namespace

// ============================================================================
// Commands
// ============================================================================

int cmd_cell_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  RunReport report;

  const int points =
      static_cast<int>(std::floor((cfg.sweep_hi - cfg.sweep_lo) / cfg.sweep_step + 1e-9)) + 1;
  std::vector<Volts> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::min(cfg.sweep_lo + cfg.sweep_step * static_cast<double>(i), cfg.sweep_hi);
  }

  const std::vector<SweepRow> rows = run_programming_sweep(cfg, grid);
  {
    CsvFile csv(out_path(cfg, "sweep.csv"), {"v_dl", "final_g", "stop_time", "outcome"});
    for (const SweepRow& row : rows) {
      csv.row({csv_num(row.v_dl), csv_num(row.final_g),
               row.stop_time.has_value() ? csv_num(*row.stop_time) : std::string(),
               outcome_field(row)});
    }
    csv.close();
  }

  // Fit analysis over the feedback-stopped rows.
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t first_stop = rows.size();
  std::size_t last_stop = 0;
  std::size_t stop_count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].outcome == ProgramOutcome::stopped_on_threshold && !rows[i].no_drive) {
      xs.push_back(rows[i].v_dl);
      ys.push_back(rows[i].final_g);
      first_stop = std::min(first_stop, i);
      last_stop = i;
      ++stop_count;
    }
  }
  report.add("sweep.programmed_points", true,
             std::to_string(stop_count) + " of " + std::to_string(rows.size()) +
                 " grid points stopped on threshold");
  if (stop_count > 0) {
    report.add("sweep.programmed_rows_contiguous", last_stop - first_stop + 1 == stop_count,
               "feedback-stopped rows form one contiguous grid block");
  }

  std::ofstream fit_out(out_path(cfg, "fit_report.txt"));
  if (!fit_out) {
    throw ConfigError("cannot open fit report for writing");
  }
  fit_out << "# programming-sweep fit report\n";
  const double g_span_total = cfg.memristor.g_on - cfg.memristor.g_off;
  int winner_degree = 0;
  std::size_t winner_len = 0;
  for (const int degree : {1, 2}) {
    const auto range = largest_fit_range(xs, ys, degree, 0.98);
    std::string detail;
    if (range.has_value()) {
      const double covered = (ys[range->end - 1] - ys[range->begin]) / g_span_total;
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "v_dl in [%.6g, %.6g] V, %zu points, R^2 = %.6f, covers %.1f%% of the "
                    "conductance span",
                    xs[range->begin], xs[range->end - 1], range->end - range->begin,
                    range->r_squared, 100.0 * covered);
      detail = buf;
      if (range->end - range->begin > winner_len) {
        winner_len = range->end - range->begin;
        winner_degree = degree;
      }
    } else {
      detail = "no contiguous window reaches R^2 >= 0.98";
    }
    fit_out << "degree " << degree << ": " << detail << "\n";
    report.add("sweep.fit_degree" + std::to_string(degree), true, detail);
  }
  if (winner_degree > 0) {
    fit_out << "winner: degree " << winner_degree << "\n";
    report.add("sweep.fit_winner", true, "degree " + std::to_string(winner_degree));
  } else {
    fit_out << "winner: none\n";
    report.add("sweep.fit_winner", true, "no qualifying fit window");
  }
  fit_out.flush();
  if (!fit_out) {
    throw ConfigError("write to fit report failed");
  }

  write_run_report(report, cfg, "cell-sweep", out_path(cfg, "run_report.txt"));
  return report.all_passed() ? 0 : 1;
}

int cmd_build_lut(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  RunReport report;
  const ComparatorParams& cmp = cfg.controller.comparator;
  const std::vector<Volts> grid = lut_grid_for(cfg);

  const LutTable analytic =
      build_lut(cfg.controller, cfg.memristor, grid, LutMethod::analytic);
  write_lut_csv(analytic, out_path(cfg, "lut_analytic.csv"));
  report.add("lut.analytic", true,
             std::to_string(analytic.entries.size()) + " entries, " +
                 std::to_string(analytic.trimmed_low.size()) + " trimmed low, " +
                 std::to_string(analytic.trimmed_high.size()) + " trimmed high");

  const LutTable simulated =
      build_lut(cfg.controller, cfg.memristor, grid, LutMethod::simulated);
  write_lut_csv(simulated, out_path(cfg, "lut_simulated.csv"));
  report.add("lut.simulated", true,
             std::to_string(simulated.entries.size()) + " entries, " +
                 std::to_string(simulated.trimmed_low.size()) + " trimmed low, " +
                 std::to_string(simulated.trimmed_high.size()) + " trimmed high");

  // Divergence between the closed-form and episode-derived tables, joined on
  // shared grid voltages; the interior excludes one knot at each end.
  std::vector<std::pair<const LutEntry*, const LutEntry*>> joined;
  {
    std::size_t ai = 0;
    for (const LutEntry& se : simulated.entries) {
      while (ai < analytic.entries.size() && analytic.entries[ai].v_dlp < se.v_dlp) {
        ++ai;
      }
      if (ai < analytic.entries.size() && analytic.entries[ai].v_dlp == se.v_dlp) {
        joined.emplace_back(&analytic.entries[ai], &se);
      }
    }
  }
  {
    CsvFile csv(out_path(cfg, "lut_divergence.csv"),
                {"v_dlp", "g_analytic", "g_simulated", "rel_error"});
    double max_rel = 0.0;
    for (std::size_t i = 0; i < joined.size(); ++i) {
      const double ga = joined[i].first->g_mem;
      const double gs = joined[i].second->g_mem;
      const double rel = std::abs(gs - ga) / ga;
      if (i > 0 && i + 1 < joined.size()) {
        max_rel = std::max(max_rel, rel);
      }
      csv.row({csv_num(joined[i].first->v_dlp), csv_num(ga), csv_num(gs), csv_num(rel)});
    }
    csv.close();
    report.add("lut.interior_divergence", joined.size() > 2 && max_rel <= 0.02,
               "max interior |simulated - analytic| / analytic = " + format_si(max_rel) +
                   " over " + std::to_string(joined.size()) + " shared knots");
  }

  if (cfg.paper_literal) {
    // The offset variant is written as raw readings rather than a table: at
    // the default parameters its constant offset pushes most grid points'
    // conductance negative, and the few high-gate knots that stay in range
    // disagree with what programming episodes deliver there — which is
    // exactly the observation this mode is for.
    const double expected_gap =
        cmp.transistor.k_prime * cmp.transistor.w_over_l * 0.75 * cmp.v_read;
    double worst = 0.0;
    CsvFile csv(out_path(cfg, "lut_literal.csv"), {"v_dlp", "g_literal", "in_range"});
    for (const Volts v : grid) {
      const ConductanceReading rc = g_of_vdlp(cmp, cfg.memristor, v);
      const ConductanceReading rl =
          g_of_vdlp(cmp, cfg.memristor, v, EquationVariant::paper_literal);
      worst = std::max(worst, std::abs((rc.value - rl.value) - expected_gap));
      csv.row({csv_num(v), csv_num(rl.value), rl.in_range() ? "1" : "0"});
    }
    csv.close();
    report.add("lut.variant_gap_identity", worst <= 1e-17,
               "max |gap - " + format_si(expected_gap) + "| = " + format_si(worst) +
                   " S across the grid");
  }

  write_run_report(report, cfg, "build-lut", out_path(cfg, "run_report.txt"));
  return report.all_passed() ? 0 : 1;
}

namespace {

/// Everything the two array commands share: build the array and table,
/// program the job, and run the window/probe checks.
struct ArrayRun {
  AcamArray array;
  LutTable lut;

  ArrayRun(const ExperimentConfig& cfg)
      : array(cfg.controller, cfg.memristor),
        lut(build_lut(cfg.controller, cfg.memristor, lut_grid_for(cfg), LutMethod::analytic)) {}
};

void check_windows(const ExperimentConfig& cfg, AcamArray& array, RunReport& report) {
  const ComparatorParams& cmp = cfg.controller.comparator;
  const Volts step = cmp.v_read / static_cast<double>(cfg.window_sweep_steps);
  const std::vector<Volts> sweep_grid =
      make_linear_grid(0.0, cmp.v_read, cfg.window_sweep_steps + 1);
  std::vector<SearchWindow> measured;
  try {
    measured = array.sweep_row_windows(sweep_grid);
  } catch (const CellFaultError& e) {
    // A job can legally leave a cell unresolvable — for example a lone lb
    // write above the resting hb bound inverts that cell's window. Surface it
    // as a failed check naming the cell instead of abandoning the report.
    report.add("array.window_sweep", false, e.what());
    return;
  }
  report.add("array.window_sweep", true, "every cell matched one contiguous sweep interval");
  const std::vector<SearchWindow> stored = array.stored_windows();

  {
    CsvFile csv(out_path(cfg, "windows.csv"), {"row", "col", "lo_volts", "hi_volts"});
    for (const SearchWindow& w : measured) {
      csv.row({std::to_string(w.row), std::to_string(w.col), csv_num(w.lo), csv_num(w.hi)});
    }
    csv.close();
  }

  bool edges_ok = true;
  std::string edges_detail = "every measured edge within one sweep step (" + format_si(step) +
                             " V) of its boundary-algebra value";
  for (std::size_t i = 0; i < measured.size(); ++i) {
    if (measured[i].dont_care) {
      continue;
    }
    const double lo_err = std::abs(measured[i].lo - stored[i].lo);
    const double hi_err = std::abs(measured[i].hi - stored[i].hi);
    if (lo_err > step + 1e-12 || hi_err > step + 1e-12) {
      edges_ok = false;
      edges_detail = "cell (row " + std::to_string(measured[i].row) + ", col " +
                     std::to_string(measured[i].col) + ") edge error " +
                     format_si(std::max(lo_err, hi_err)) + " V exceeds one sweep step";
    }
  }
  report.add("array.window_edges", edges_ok, edges_detail);

  bool disjoint_ok = true;
  std::string disjoint_detail = "per-column windows are pairwise disjoint";
  for (int c = 0; c < array.cols(); ++c) {
    std::vector<const SearchWindow*> col;
    for (const SearchWindow& w : measured) {
      if (w.col == c && !w.dont_care) {
        col.push_back(&w);
      }
    }
    std::sort(col.begin(), col.end(),
              [](const SearchWindow* a, const SearchWindow* b) { return a->lo < b->lo; });
    for (std::size_t i = 1; i < col.size(); ++i) {
      if (!(col[i]->lo > col[i - 1]->hi)) {
        disjoint_ok = false;
        disjoint_detail = "column " + std::to_string(c) + " windows overlap between rows " +
                          std::to_string(col[i - 1]->row) + " and " + std::to_string(col[i]->row);
      }
    }
  }
  report.add("array.windows_disjoint", disjoint_ok, disjoint_detail);
}

}  // namespace

int cmd_array_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  RunReport report;

  ArrayRun run(cfg);
  const std::vector<JobOp> job =
      cfg.job_file.empty() ? default_demo_job() : parse_job_file(cfg.job_file);
  const std::vector<DeviceRef> writes = stage_job(run.array, job);

  {
    CsvFile staircase(out_path(cfg, "staircase.csv"), staircase_columns(run.array));
    program_writes(run.array, run.lut, writes, report, &staircase);
    staircase.close();
  }

  check_windows(cfg, run.array, report);

  {
    std::vector<std::string> cols;
    cols.emplace_back("probe_row");
    for (int c = 0; c < run.array.cols(); ++c) {
      cols.push_back("input_c" + std::to_string(c));
    }
    for (int r = 0; r < run.array.rows(); ++r) {
      cols.push_back("match_r" + std::to_string(r));
    }
    cols.emplace_back("as_predicted");
    CsvFile results(out_path(cfg, "search_results.csv"), cols);
    check_center_probes(run.array, report, &results);
    results.close();
  }

  write_run_report(report, cfg, "array-demo", out_path(cfg, "run_report.txt"));
  return report.all_passed() ? 0 : 1;
}

int cmd_search_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_out_dir(cfg);
  RunReport report;

  ArrayRun run(cfg);
  const std::vector<JobOp> job =
      cfg.job_file.empty() ? default_demo_job() : parse_job_file(cfg.job_file);
  const std::vector<DeviceRef> writes = stage_job(run.array, job);
  program_writes(run.array, run.lut, writes, report, nullptr);

  const ComparatorParams& cmp = cfg.controller.comparator;

  // Independent window route for the equivalence check: map each stored
  // conductance to its programming boundary, then round-trip that voltage
  // back into the search domain. Algebraically identical to the direct
  // search boundary, but through different code.
  struct OracleWindow {
    Volts lo = 0.0;
    Volts hi = 0.0;
    bool dont_care = false;
  };
  std::vector<OracleWindow> oracle;
  for (int r = 0; r < run.array.rows(); ++r) {
    for (int c = 0; c < run.array.cols(); ++c) {
      const AcamCell& cell = run.array.cell(r, c);
      OracleWindow w;
      w.dont_care = cell.dont_care;
      if (!w.dont_care) {
        w.lo = vdls_of_vdlp(cmp, vdlp_of_conductance(cmp, conductance(cell.lb)));
        w.hi = vdls_of_vdlp(cmp, vdlp_of_conductance(cmp, conductance(cell.hb)));
      }
      oracle.push_back(w);
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, cmp.v_read);
  std::size_t disagreements = 0;
  {
    std::vector<std::string> cols;
    cols.emplace_back("probe_index");
    for (int c = 0; c < run.array.cols(); ++c) {
      cols.push_back("input_c" + std::to_string(c));
    }
    for (int r = 0; r < run.array.rows(); ++r) {
      cols.push_back("match_r" + std::to_string(r));
    }
    cols.emplace_back("agree");
    CsvFile csv(out_path(cfg, "probes.csv"), cols);
    for (int p = 0; p < cfg.probe_count; ++p) {
      std::vector<Volts> inputs(static_cast<std::size_t>(run.array.cols()));
      for (Volts& v : inputs) {
        v = uniform(rng);
      }
      const std::vector<bool> matches = run.array.search(inputs);
      bool agree = true;
      for (int r = 0; r < run.array.rows(); ++r) {
        bool expect = true;
        for (int c = 0; c < run.array.cols() && expect; ++c) {
          const OracleWindow& w =
              oracle[static_cast<std::size_t>(r) * static_cast<std::size_t>(run.array.cols()) +
                     static_cast<std::size_t>(c)];
          const Volts v = inputs[static_cast<std::size_t>(c)];
          expect = w.dont_care || (v >= w.lo && v <= w.hi);
        }
        if (matches[static_cast<std::size_t>(r)] != expect) {
          agree = false;
        }
      }
      if (!agree) {
        ++disagreements;
      }
      std::vector<std::string> fields;
      fields.push_back(std::to_string(p));
      for (const Volts v : inputs) {
        fields.push_back(csv_num(v));
      }
      for (int r = 0; r < run.array.rows(); ++r) {
        fields.push_back(matches[static_cast<std::size_t>(r)] ? "1" : "0");
      }
      fields.push_back(agree ? "1" : "0");
      csv.row(fields);
    }
    csv.close();
  }
  report.add("search.equivalence", disagreements == 0,
             std::to_string(disagreements) + " of " + std::to_string(cfg.probe_count) +
                 " probes disagreed with the independent window route");

  check_center_probes(run.array, report, nullptr);

  write_run_report(report, cfg, "search", out_path(cfg, "run_report.txt"));
  return report.all_passed() ? 0 : 1;
}

namespace {

void add_trace_checks(const ProgramResult& r, Seconds dt, RunReport& report) {
  bool finite = true;
  bool uniform = true;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceSample& s = r.trace[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.v_out) || !std::isfinite(s.v_mid) ||
        !std::isfinite(s.g_mem)) {
      finite = false;
    }
    if (std::abs(s.t - static_cast<double>(i) * dt) > 1e-12 * std::max(1.0, s.t / dt)) {
      uniform = false;
    }
  }
  report.add("trace.finite", finite, "all logged channel values are finite");
  report.add("trace.uniform_spacing", uniform, "timestamps advance by exactly dt");
}

std::string episode_summary(const ProgramResult& r) {
  std::string s = std::string("outcome=") + program_outcome_name(r.outcome) +
                  ", final_g=" + format_si(r.final_g) + " S";
  if (r.stop_time.has_value()) {
    s += ", stop_time=" + format_si(*r.stop_time) + " s";
  }
  if (r.no_drive) {
    s += ", no_drive";
  }
  return s;
}

}  // namespace

int cmd_set_single(const ExperimentConfig& cfg, std::optional<Volts> v_dlp,
                   std::optional<Siemens> g_target, double initial_w) {
  cfg.validate();
  if (v_dlp.has_value() == g_target.has_value()) {
    throw ConfigError("set: give exactly one of a gate voltage or a conductance target");
  }
  if (!std::isfinite(initial_w) || initial_w < 0.0 || initial_w > 1.0) {
    throw ConfigError("set: initial w must lie in [0, 1]");
  }
  ensure_out_dir(cfg);
  RunReport report;

  Volts v = 0.0;
  if (g_target.has_value()) {
    const LutTable lut =
        build_lut(cfg.controller, cfg.memristor, lut_grid_for(cfg), LutMethod::analytic);
    v = vdlp_for_target(lut, *g_target);
    report.add("set.table_lookup", true,
               format_si(*g_target) + " S -> v_dlp = " + format_si(v) + " V");
  } else {
    v = *v_dlp;
  }

  MemristorState cell;
  cell.params = cfg.memristor;
  cell.w = initial_w;
  const ProgramResult r = run_set(cell, v, cfg.controller);
  write_trace_csv(out_path(cfg, "set_trace.csv"), r);
  add_trace_checks(r, cfg.controller.dt, report);
  report.add("set.episode", true, episode_summary(r));

  write_run_report(report, cfg, "set", out_path(cfg, "run_report.txt"));
  std::printf("set: %s\n", episode_summary(r).c_str());
  return report.all_passed() ? 0 : 1;
}

int cmd_reset_single(const ExperimentConfig& cfg, double initial_w) {
  cfg.validate();
  if (!std::isfinite(initial_w) || initial_w < 0.0 || initial_w > 1.0) {
    throw ConfigError("reset: initial w must lie in [0, 1]");
  }
  ensure_out_dir(cfg);
  RunReport report;

  MemristorState cell;
  cell.params = cfg.memristor;
  cell.w = initial_w;
  const ProgramResult r = run_reset(cell, cfg.controller);
  write_trace_csv(out_path(cfg, "reset_trace.csv"), r);
  add_trace_checks(r, cfg.controller.dt, report);
  report.add("reset.episode", true, episode_summary(r));

  write_run_report(report, cfg, "reset", out_path(cfg, "run_report.txt"));
  std::printf("reset: %s\n", episode_summary(r).c_str());
  return report.all_passed() ? 0 : 1;
}

}  // namespace acamsim
