#pragma once

#include <cstdint>

#include "acamsim/devices.hpp"

namespace acamsim {

// ============================================================================
// Memristor comparator: one memristor in series with one NMOS transistor
// between a supply rail and ground, read through an ideal inverter
// ============================================================================

/// Circuit constants shared by every cell: the transistor, the search-mode
/// read rail, the programming rail, and the programming stop threshold.
struct ComparatorParams {
  TransistorParams transistor{};
  Volts v_read = 0.6;
  Volts v_set = 1.8;
  Volts v_dth = 1.2;

  /// Stop threshold as a fraction of the programming rail.
  [[nodiscard]] double alpha() const { return v_dth / v_set; }

  /// Throws std::invalid_argument unless 0 < v_read < v_set and
  /// 0 < v_dth < v_set (and the transistor validates).
  void validate() const;
};

/// Quasi-static operating point of one comparator branch. v_mid is the node
/// between memristor and transistor; v_out is the ideal inverter's reading of
/// that node against the active rail. KCL residual at the solution is at most
/// 1 pA.
struct BranchSolution {
  Volts v_mid = 0.0;
  Amps i_branch = 0.0;
  Volts v_out = 0.0;
};

/// Which algebraic form of the boundary-voltage relations to evaluate. The
/// `consistent` forms follow from the branch equations themselves;
/// `paper_literal` reproduces a published variant whose search-mode intercept
/// carries a known constant offset, kept so the two can be compared.
enum class EquationVariant : std::uint8_t { consistent, paper_literal };

// ----------------------------------------------------------------------------
// Branch solves (bracketed bisection, |KCL residual| <= 1 pA)
// ----------------------------------------------------------------------------

/// Search mode: memristor from the v_read rail down to v_mid, transistor from
/// v_mid to ground with its gate at v_dl. Returns the unique operating point.
/// Edge behavior: a cutoff gate floats v_mid up to v_read (v_out = 0); a
/// vanishing conductance lets the transistor pin v_mid to ground.
/// Throws SolverError if the bracket carries no sign change.
[[nodiscard]] BranchSolution solve_search_branch(const ComparatorParams& p, Siemens g_mem,
                                                 Volts v_dl);

/// Program mode: same topology with the rail at v_set and the gate at v_dl.
/// Used quasi-statically during set programming and for boundary root finds.
[[nodiscard]] BranchSolution solve_program_branch(const ComparatorParams& p, Siemens g_mem,
                                                  Volts v_dl);

/// Reset mode: rails swapped, v_set on the transistor side and the memristor's
/// outer terminal grounded, gate at v_gate. v_mid is again the shared node, so
/// the device sees -v_mid. Current flows rail -> transistor -> memristor.
[[nodiscard]] BranchSolution solve_reset_branch(const ComparatorParams& p, Siemens g_mem,
                                                Volts v_gate);

// ----------------------------------------------------------------------------
// Boundary maps between conductance and data-line voltage
// ----------------------------------------------------------------------------
// The closed forms below assume the quadratic saturation law and are the
// product-level definition of a cell's match boundaries; the *_solved
// variants find the same boundaries by root-finding on the branch solves and
// exist for cross-checking. The two coincide only where the closed form's
// operating-region assumption holds; see the comparator tests.

/// Search-mode boundary voltage V_DLS for a given conductance: the affine map
/// g * L/(W*K') + v_read/4 + v_t (consistent variant). The paper_literal
/// variant uses a v_read intercept instead of v_read/4.
/// Throws OutOfRangeError if the boundary leaves [0, v_read].
[[nodiscard]] Volts vdls_of_conductance(const ComparatorParams& p, Siemens g_mem,
                                        EquationVariant variant = EquationVariant::consistent);

/// Numeric search boundary: the gate voltage at which the solved search
/// branch settles at v_mid = v_read/2. Resolved to 0.1 mV.
/// Throws OutOfRangeError if no such gate voltage exists within [0, v_read].
[[nodiscard]] Volts vdls_of_conductance_solved(const ComparatorParams& p, Siemens g_mem);

/// Program-mode boundary voltage V_DLP for a given target conductance:
/// v_t + sqrt(2 * (v_set - v_dth) * g * L / (W * K')).
/// Throws OutOfRangeError if the boundary exceeds v_set.
[[nodiscard]] Volts vdlp_of_conductance(const ComparatorParams& p, Siemens g_mem);

/// Numeric program boundary: the gate voltage at which the program branch
/// (memristor replaced by a fixed resistor of conductance g_mem) settles at
/// v_mid = v_dth. Resolved to 0.1 mV.
[[nodiscard]] Volts vdlp_of_conductance_solved(const ComparatorParams& p, Siemens g_mem);

/// Direct map from a program-mode boundary voltage to the search-mode
/// boundary voltage of the conductance it programs:
/// (v_dlp - v_t)^2 / (2 * (v_set - v_dth)) + v_read/4 + v_t.
/// Throws std::invalid_argument unless v_t <= v_dlp <= v_set.
[[nodiscard]] Volts vdls_of_vdlp(const ComparatorParams& p, Volts v_dlp);

}  // namespace acamsim
