#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "acamsim/comparator.hpp"
#include "acamsim/errors.hpp"

using namespace acamsim;

TEST_SUITE("comparator") {
  TEST_CASE("the closed-form search boundary is the documented affine map") {
    const ComparatorParams p;
    // g / (k' * W/L) + v_read/4 + v_t at the default parameters.
    CHECK(vdls_of_conductance(p, 100e-6) == doctest::Approx(0.5));
    CHECK(vdls_of_conductance(p, 2e-6) == doctest::Approx(0.451));
    CHECK(vdls_of_conductance(p, 200e-6) == doctest::Approx(0.55));
  }

  TEST_CASE("search boundaries past the read rail are rejected with the achievable range") {
    const ComparatorParams p;
    CHECK_THROWS_AS(vdls_of_conductance(p, 400e-6), OutOfRangeError);
  }

  TEST_CASE("the offset equation variant has no in-range search boundary at all") {
    // Its intercept is v_read + v_t, which already exceeds the read rail
    // before any conductance term is added — the variant is kept purely so
    // the discrepancy stays measurable in conductance space.
    const ComparatorParams p;
    CHECK_THROWS_AS(vdls_of_conductance(p, 0.0, EquationVariant::paper_literal),
                    OutOfRangeError);
    CHECK_THROWS_AS(vdls_of_conductance(p, 100e-6, EquationVariant::paper_literal),
                    OutOfRangeError);
  }

  TEST_CASE("the solved search boundary lands where the branch midpoint sits at half rail") {
    const ComparatorParams p;
    const Volts v = vdls_of_conductance_solved(p, 100e-6);
    // Hand-derived: the transistor is saturated there, so
    // v_dl = v_t + sqrt(g * v_read/2 / (k'W/L / 2)) = 0.3 + sqrt(0.03).
    CHECK(v == doctest::Approx(0.47320508).epsilon(1e-4));
    CHECK(solve_search_branch(p, 100e-6, v).v_mid == doctest::Approx(0.3).epsilon(2e-3));
  }

  TEST_CASE("closed-form and solved search boundaries agree in the triode regime") {
    // The affine form assumes the transistor sits in triode at the boundary,
    // which needs g >= 300 uS; a lowered gate threshold keeps such boundaries
    // below the read rail so both routes are defined.
    ComparatorParams p;
    p.transistor.v_t = 0.1;
    for (const Siemens g : {320e-6, 400e-6, 500e-6, 600e-6, 680e-6}) {
      const Volts closed = vdls_of_conductance(p, g);
      const Volts solved = vdls_of_conductance_solved(p, g);
      CHECK(std::abs(closed - solved) <= 2e-3);
    }
  }

  TEST_CASE("the search branch operating point matches a hand solution") {
    const ComparatorParams p;
    // At v_dl = 0.5 and g = 100 uS the balance sits exactly at the pinch-off
    // point: v_mid = v_ov = 0.2, both devices carrying 40 uA.
    const BranchSolution s = solve_search_branch(p, 100e-6, 0.5);
    CHECK(s.v_mid == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(s.i_branch == doctest::Approx(40e-6).epsilon(1e-6));
    CHECK(s.v_out == doctest::Approx(0.4).epsilon(1e-6));
  }

  TEST_CASE("a cut-off gate floats the shared node to the rail") {
    const ComparatorParams p;
    const BranchSolution s = solve_search_branch(p, 100e-6, 0.2);
    CHECK(s.v_mid == doctest::Approx(p.v_read));
    CHECK(s.v_out == doctest::Approx(0.0));
    CHECK(s.i_branch == doctest::Approx(0.0));
  }

  TEST_CASE("a vanishing conductance lets the transistor pin the node to ground") {
    const ComparatorParams p;
    const BranchSolution s = solve_search_branch(p, 0.0, 0.6);
    CHECK(s.v_mid == doctest::Approx(0.0));
    CHECK(s.i_branch == 0.0);
  }

  TEST_CASE("branch solves reject malformed inputs") {
    const ComparatorParams p;
    CHECK_THROWS_AS(solve_search_branch(p, -1e-6, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(solve_search_branch(p, 1e-6, std::nan("")), std::invalid_argument);
  }

  TEST_CASE("the program boundary drives the branch exactly to the stop threshold") {
    const ComparatorParams p;
    const Volts v = vdlp_of_conductance(p, 100e-6);
    CHECK(v == doctest::Approx(0.3 + std::sqrt(0.06)));
    CHECK(solve_program_branch(p, 100e-6, v).v_mid == doctest::Approx(p.v_dth).epsilon(1e-6));
    // The numeric root agrees — in program mode the closed form's saturation
    // assumption genuinely holds at the boundary.
    CHECK(vdlp_of_conductance_solved(p, 100e-6) == doctest::Approx(v).epsilon(1e-5));
  }

  TEST_CASE("program boundaries past the program rail are rejected") {
    const ComparatorParams p;
    CHECK_THROWS_AS(vdlp_of_conductance(p, 4e-3), OutOfRangeError);
  }

  TEST_CASE("the reset branch balances the source follower against the grounded device") {
    const ComparatorParams p;
    const BranchSolution s = solve_reset_branch(p, 200e-6, 2.2);
    // KCL at the shared node: the follower sources what the device sinks.
    const Amps through_fet = transistor_current(p.transistor, 2.2 - s.v_mid, p.v_set - s.v_mid);
    CHECK(through_fet == doctest::Approx(s.i_branch).epsilon(1e-6));
    CHECK(s.v_mid > 0.9);  // the device sees -v_mid, beyond its clearing threshold
    CHECK(s.v_mid < p.v_set);
    // A harder gate pulls the node higher.
    CHECK(solve_reset_branch(p, 200e-6, 2.2).v_mid > solve_reset_branch(p, 200e-6, 1.9).v_mid);
  }

  TEST_CASE("boundary voltages round-trip between program and search mode exactly") {
    const ComparatorParams p;
    const MemristorParams bounds{};
    for (int i = 0; i < 20; ++i) {
      const Siemens g =
          bounds.g_off + (bounds.g_on - bounds.g_off) * static_cast<double>(i) / 19.0;
      const Volts direct = vdls_of_conductance(p, g);
      const Volts routed = vdls_of_vdlp(p, vdlp_of_conductance(p, g));
      CHECK(std::abs(direct - routed) <= 1e-12);
    }
  }

  TEST_CASE("the round-trip map rejects gate voltages outside [v_t, v_set]") {
    const ComparatorParams p;
    CHECK(vdls_of_vdlp(p, 0.3) == doctest::Approx(0.45));  // zero overdrive
    CHECK_THROWS_AS(vdls_of_vdlp(p, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(vdls_of_vdlp(p, 1.9), std::invalid_argument);
  }

  TEST_CASE("closed forms refuse the linear saturation law; the solved routes accept it") {
    ComparatorParams p;
    p.transistor.law = SaturationLaw::linear;
    CHECK_THROWS_AS(vdls_of_conductance(p, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(vdlp_of_conductance(p, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(vdls_of_vdlp(p, 0.5), std::invalid_argument);
    const Volts solved = vdls_of_conductance_solved(p, 1e-4);
    CHECK(solved > 0.0);
    CHECK(solved < p.v_read);
  }

  TEST_CASE("comparator validation rejects inverted rails") {
    ComparatorParams p;
    p.v_read = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ComparatorParams{};
    p.v_read = 2.0;  // above v_set
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ComparatorParams{};
    p.v_dth = 1.8;  // must sit strictly below v_set
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK(ComparatorParams{}.alpha() == doctest::Approx(2.0 / 3.0));
  }
}
