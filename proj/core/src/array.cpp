#include "acamsim/array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "acamsim/errors.hpp"

namespace acamsim {

namespace {

std::string cell_label(int row, int col) {
  return "(row " + std::to_string(row) + ", col " + std::to_string(col) + ")";
}

const char* mode_label(ArrayMode m) {
  switch (m) {
    case ArrayMode::search_idle:
      return "search_idle";
    case ArrayMode::writing:
      return "writing";
    case ArrayMode::resetting:
      return "resetting";
    case ArrayMode::sweeping:
      return "sweeping";
    case ArrayMode::verifying:
      return "verifying";
  }
  return "unknown";
}

}  // namespace

// ============================================================================
// Construction and addressing
// ============================================================================

AcamArray::AcamArray(ControllerConfig ctrl, MemristorParams mem, int rows, int cols)
    : ctrl_(std::move(ctrl)), mem_(mem), rows_(rows), cols_(cols) {
  ctrl_.validate();
  mem_.validate();
  if (rows_ < 1 || cols_ < 1) {
    throw std::invalid_argument("AcamArray: dimensions must be at least 1x1");
  }
  MemristorState fresh;
  fresh.params = mem_;
  fresh.w = 0.0;
  cells_.resize(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_));
  for (AcamCell& c : cells_) {
    c.lb = fresh;
    c.hb = fresh;
    c.dont_care = false;
  }
}

void AcamArray::check_cell_index(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw OutOfRangeError("cell address " + cell_label(row, col) + " outside the " +
                          std::to_string(rows_) + "x" + std::to_string(cols_) + " array");
  }
}

const AcamCell& AcamArray::cell(int row, int col) const {
  check_cell_index(row, col);
  return cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                static_cast<std::size_t>(col)];
}

MemristorState& AcamArray::device_at(const CellAddress& addr) {
  check_cell_index(addr.row, addr.col);
  AcamCell& c = cells_[static_cast<std::size_t>(addr.row) * static_cast<std::size_t>(cols_) +
                       static_cast<std::size_t>(addr.col)];
  return addr.side == CellSide::lb ? c.lb : c.hb;
}

// ============================================================================
// The shared-circuit lease
// ============================================================================

AcamArray::CircuitLease::CircuitLease(AcamArray& array, ArrayMode mode) : array_(array) {
  if (array_.mode_ != ArrayMode::search_idle) {
    throw ContentionError(std::string("programming circuit busy (") + mode_label(array_.mode_) +
                          "); one operation at a time");
  }
  array_.mode_ = mode;
}

AcamArray::CircuitLease::~CircuitLease() { array_.mode_ = ArrayMode::search_idle; }

// ============================================================================
// State staging
// ============================================================================

void AcamArray::set_dont_care(int row, int col, bool on) {
  if (mode_ != ArrayMode::search_idle) {
    throw ContentionError("cannot reconfigure a cell while the programming circuit is busy");
  }
  check_cell_index(row, col);
  cells_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(col)]
      .dont_care = on;
}

void AcamArray::load_device(const CellAddress& addr, double w) {
  if (mode_ != ArrayMode::search_idle) {
    throw ContentionError("cannot load a device while the programming circuit is busy");
  }
  if (!std::isfinite(w)) {
    throw std::invalid_argument("load_device: w must be finite");
  }
  device_at(addr).w = std::clamp(w, 0.0, 1.0);
}

// ============================================================================
// Programming operations
// ============================================================================

ProgramResult AcamArray::write_cell(const CellAddress& addr, Siemens g_target,
                                    const LutTable& lut) {
  CircuitLease lease(*this, ArrayMode::writing);
  require_fingerprint(lut, ctrl_.comparator, mem_);
  const Volts v_dlp = vdlp_for_target(lut, g_target);
  MemristorState& dev = device_at(addr);
  const ProgramResult cleared = run_reset(dev, ctrl_);
  dev = cleared.final_state;
  ProgramResult programmed = run_set(dev, v_dlp, ctrl_);
  dev = programmed.final_state;
  return programmed;
}

ProgramResult AcamArray::reset_cell(const CellAddress& addr) {
  CircuitLease lease(*this, ArrayMode::resetting);
  MemristorState& dev = device_at(addr);
  ProgramResult cleared = run_reset(dev, ctrl_);
  dev = cleared.final_state;
  return cleared;
}

// ============================================================================
// Measurement operations
// ============================================================================

Siemens AcamArray::verify_cell(const CellAddress& addr) {
  CircuitLease lease(*this, ArrayMode::verifying);
  const ComparatorParams& cmp = ctrl_.comparator;
  const MemristorState& dev = device_at(addr);
  const BranchSolution sol = solve_search_branch(cmp, conductance(dev), ctrl_.v_verify_gate);
  const Amps i_meas = sol.i_branch;

  // Recover the transistor's drain voltage from the measured current alone
  // (the triode current is strictly increasing in v_ds on this interval),
  // then attribute the remaining rail drop to the device.
  Volts lo = 0.0;
  Volts hi = cmp.v_read;
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-15; ++iter) {
    const Volts mid = 0.5 * (lo + hi);
    const Amps i_mid = transistor_current(cmp.transistor, ctrl_.v_verify_gate, mid);
    if (i_mid < i_meas) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Volts v_ds = 0.5 * (lo + hi);
  const Volts v_dev = cmp.v_read - v_ds;
  if (!(v_dev > 0.0)) {
    throw SolverError("verify_cell: no rail headroom left for the device at " +
                      cell_label(addr.row, addr.col));
  }
  return i_meas / v_dev;
}

SearchWindow AcamArray::window_of(int row, int col) const {
  const AcamCell& c = cell(row, col);
  const ComparatorParams& cmp = ctrl_.comparator;
  SearchWindow w;
  w.row = row;
  w.col = col;
  w.dont_care = c.dont_care;
  if (c.dont_care) {
    w.lo = 0.0;
    w.hi = cmp.v_read;
    return w;
  }
  w.lo = vdls_of_conductance(cmp, conductance(c.lb));
  w.hi = vdls_of_conductance(cmp, conductance(c.hb));
  return w;
}

std::vector<SearchWindow> AcamArray::stored_windows() const {
  std::vector<SearchWindow> out;
  out.reserve(cells_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out.push_back(window_of(r, c));
    }
  }
  return out;
}

std::vector<SearchWindow> AcamArray::sweep_row_windows(const std::vector<Volts>& sweep_grid) {
  CircuitLease lease(*this, ArrayMode::sweeping);
  const ComparatorParams& cmp = ctrl_.comparator;
  if (sweep_grid.size() < 2) {
    throw std::invalid_argument("sweep_row_windows: grid needs at least two points");
  }
  for (std::size_t i = 0; i < sweep_grid.size(); ++i) {
    if (!std::isfinite(sweep_grid[i]) || sweep_grid[i] < 0.0 || sweep_grid[i] > cmp.v_read) {
      throw std::invalid_argument("sweep_row_windows: grid voltages must lie in [0, v_read]");
    }
    if (i > 0 && !(sweep_grid[i] > sweep_grid[i - 1])) {
      throw std::invalid_argument("sweep_row_windows: grid must be strictly increasing");
    }
  }

  std::vector<SearchWindow> out;
  out.reserve(cells_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const SearchWindow stored = window_of(r, c);
      if (stored.dont_care) {
        out.push_back({r, c, sweep_grid.front(), sweep_grid.back(), true});
        continue;
      }
      std::size_t first = sweep_grid.size();
      std::size_t last = 0;
      std::size_t runs = 0;
      bool prev_match = false;
      for (std::size_t i = 0; i < sweep_grid.size(); ++i) {
        const bool match = sweep_grid[i] >= stored.lo && sweep_grid[i] <= stored.hi;
        if (match) {
          if (!prev_match) {
            ++runs;
          }
          first = std::min(first, i);
          last = i;
        }
        prev_match = match;
      }
      if (runs != 1) {
        std::string why;
        if (stored.lo > stored.hi) {
          why = "its stored window is inverted (lower-bound device above the upper-bound one)";
        } else if (runs == 0) {
          why = "no sweep point falls inside its window (sub-step width or outside the span)";
        } else {
          why = "a working cell yields exactly one";
        }
        throw CellFaultError("cell " + cell_label(r, c) + " matched " + std::to_string(runs) +
                             " contiguous sweep intervals; " + why);
      }
      out.push_back({r, c, sweep_grid[first], sweep_grid[last], false});
    }
  }
  return out;
}

std::vector<bool> AcamArray::search(const std::vector<Volts>& inputs) const {
  if (mode_ != ArrayMode::search_idle) {
    throw ContentionError("search rejected while the programming circuit is busy");
  }
  const ComparatorParams& cmp = ctrl_.comparator;
  if (static_cast<int>(inputs.size()) != cols_) {
    throw std::invalid_argument("search: expected one input voltage per column");
  }
  for (const Volts v : inputs) {
    if (!std::isfinite(v) || v < 0.0 || v > cmp.v_read) {
      throw std::invalid_argument("search: inputs must lie in [0, v_read]");
    }
  }
  std::vector<bool> matches(static_cast<std::size_t>(rows_), false);
  for (int r = 0; r < rows_; ++r) {
    bool row_match = true;
    for (int c = 0; c < cols_ && row_match; ++c) {
      const SearchWindow w = window_of(r, c);
      const Volts v = inputs[static_cast<std::size_t>(c)];
      row_match = w.dont_care || (v >= w.lo && v <= w.hi);
    }
    matches[static_cast<std::size_t>(r)] = row_match;
  }
  return matches;
}

}  // namespace acamsim
