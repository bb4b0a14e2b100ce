#pragma once

#include <cstdint>
#include <vector>

#include "acamsim/comparator.hpp"
#include "acamsim/controller.hpp"
#include "acamsim/devices.hpp"
#include "acamsim/lut.hpp"

namespace acamsim {

// ============================================================================
// Analog CAM array: paired-bound cells, one shared programming circuit
// ============================================================================

/// Which half of a cell an operation addresses: the low-bound device sets the
/// lower window edge, the high-bound device the upper one.
enum class CellSide : std::uint8_t { lb, hb };

struct CellAddress {
  int row = 0;
  int col = 0;
  CellSide side = CellSide::lb;
};

/// One analog CAM cell: two memristors bounding a match window, plus the
/// wildcard flag that makes the cell match any input.
struct AcamCell {
  MemristorState lb{};
  MemristorState hb{};
  bool dont_care = false;
};

/// What the shared programming/measurement circuit is currently doing.
/// search_idle is the rest state in which searches are allowed.
enum class ArrayMode : std::uint8_t { search_idle, writing, resetting, sweeping, verifying };

/// A cell's match window in data-line volts.
struct SearchWindow {
  int row = 0;
  int col = 0;
  Volts lo = 0.0;
  Volts hi = 0.0;
  bool dont_care = false;
};

/// Row-by-column grid of analog CAM cells sharing one programming circuit.
/// All programming and measurement operations serialize through that circuit;
/// overlapping requests throw ContentionError rather than interleaving.
class AcamArray {
 public:
  /// Cells start fully reset (every device at its minimum conductance).
  AcamArray(ControllerConfig ctrl, MemristorParams mem, int rows = 4, int cols = 2);

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] ArrayMode mode() const { return mode_; }
  [[nodiscard]] const ControllerConfig& controller() const { return ctrl_; }
  [[nodiscard]] const MemristorParams& device_params() const { return mem_; }
  [[nodiscard]] const AcamCell& cell(int row, int col) const;

  /// Marks or clears a cell's wildcard flag (matches every input when set).
  void set_dont_care(int row, int col, bool on);

  /// Injects a device state directly, bypassing the programming circuit;
  /// intended for staging test scenarios. Still refuses to run while the
  /// circuit is busy. w is clamped to [0, 1].
  void load_device(const CellAddress& addr, double w);

  /// Programs one device to g_target: resets it to the minimum conductance,
  /// then runs a feedback-stopped set episode at the table-interpolated gate
  /// voltage. Only the addressed device changes. Returns the set episode's
  /// result. Throws FingerprintError if the table was built for different
  /// parameters and OutOfRangeError if g_target is outside the table.
  ProgramResult write_cell(const CellAddress& addr, Siemens g_target, const LutTable& lut);

  /// Clears one device to the minimum conductance. Only the addressed device
  /// changes.
  ProgramResult reset_cell(const CellAddress& addr);

  /// Precise conductance measurement: drives the cell's gate fully on, then
  /// infers the conductance from the measured branch current by inverting
  /// the transistor law (the series transistor is modeled, not assumed to be
  /// a short). Does not disturb the device.
  [[nodiscard]] Siemens verify_cell(const CellAddress& addr);

  /// Health check: evaluates every cell's match predicate over a sweep grid
  /// (strictly increasing, within [0, v_read]) and reports the measured
  /// window edges. A cell whose matches do not form exactly one contiguous
  /// run resolvable at this grid — including a window narrower than one
  /// grid step — throws CellFaultError.
  [[nodiscard]] std::vector<SearchWindow> sweep_row_windows(const std::vector<Volts>& sweep_grid);

  /// The match windows implied directly by the stored conductances via the
  /// search-boundary algebra (no sweeping).
  [[nodiscard]] std::vector<SearchWindow> stored_windows() const;

  /// Evaluates one parallel search: inputs holds one data-line voltage per
  /// column, and a row matches when every one of its cells matches (input
  /// inside the cell's window, edges inclusive, or the cell is dont_care).
  /// Rejected while the programming circuit is busy.
  [[nodiscard]] std::vector<bool> search(const std::vector<Volts>& inputs) const;

  /// Occupies the shared programming circuit for the lifetime of the guard.
  /// Operations requested while a lease is held throw ContentionError.
  /// Exposed so callers (and tests) can prove serialization is enforced.
  class CircuitLease {
   public:
    CircuitLease(AcamArray& array, ArrayMode mode);
    ~CircuitLease();
    CircuitLease(const CircuitLease&) = delete;
    CircuitLease& operator=(const CircuitLease&) = delete;

   private:
    AcamArray& array_;
  };

 private:
  [[nodiscard]] MemristorState& device_at(const CellAddress& addr);
  void check_cell_index(int row, int col) const;
  [[nodiscard]] SearchWindow window_of(int row, int col) const;

  ControllerConfig ctrl_;
  MemristorParams mem_;
  int rows_;
  int cols_;
  std::vector<AcamCell> cells_;  // row-major
  ArrayMode mode_ = ArrayMode::search_idle;
};

}  // namespace acamsim
