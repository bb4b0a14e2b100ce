#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acamsim/config.hpp"
#include "acamsim/errors.hpp"
#include "acamsim/experiments.hpp"

using namespace acamsim;

namespace {

ExperimentConfig parse_str(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "inline");
}

/// Expects parsing to fail and returns the error message for inspection.
std::string parse_error(const std::string& text) {
  try {
    std::istringstream in(text);
    (void)parse_config(in, "inline");
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

std::string temp_path(const char* tag) {
  return "/tmp/acamsim_" + std::string(tag) + "_" + std::to_string(::getpid()) + ".txt";
}

std::string write_temp(const char* tag, const std::string& content) {
  const std::string path = temp_path(tag);
  std::ofstream out(path);
  out << content;
  out.close();
  return path;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("the echoed default configuration parses back to an identical echo") {
    const ExperimentConfig def;
    const std::string first = echo_config(def);
    const ExperimentConfig reparsed = parse_str(first);
    CHECK(echo_config(reparsed) == first);
  }

  TEST_CASE("every section and key can be overridden") {
    const ExperimentConfig cfg = parse_str(
        "[memristor]\n"
        "g_off = 1e-6\n"
        "g_on = 1.5e-4\n"
        "v_th_set = 0.45\n"
        "v_th_reset = -0.8\n"
        "k_set = 2e5\n"
        "k_reset = 9e4\n"
        "\n"
        "[transistor]\n"
        "k_prime = 450e-6\n"
        "w_over_l = 5\n"
        "v_t = 0.25\n"
        "law = linear\n"
        "v_dsat = 0.12\n"
        "\n"
        "[comparator]\n"
        "v_read = 0.5\n"
        "v_set = 1.7\n"
        "v_dth = 1.1\n"
        "\n"
        "[controller]\n"
        "dt = 2e-8\n"
        "t_max = 3e-5\n"
        "v_stop = 0.35\n"
        "stop_latency = 1e-7\n"
        "v_reset_gate = 2.1\n"
        "v_verify_gate = 1.8\n"
        "\n"
        "[experiment]\n"
        "kind = array-demo\n"
        "out_dir = results\n"
        "seed = 42\n"
        "sweep_lo = 0.4\n"
        "sweep_hi = 0.9\n"
        "sweep_step = 0.02\n"
        "lut_lo = 0.3\n"
        "lut_hi = 1.6\n"
        "lut_points = 32\n"
        "window_sweep_steps = 64\n"
        "probe_count = 50\n"
        "paper_literal = yes\n"
        "job_file = plan.job\n");

    CHECK(cfg.memristor.g_off == 1e-6);
    CHECK(cfg.memristor.g_on == 1.5e-4);
    CHECK(cfg.memristor.v_th_set == 0.45);
    CHECK(cfg.memristor.v_th_reset == -0.8);
    CHECK(cfg.memristor.k_set == 2e5);
    CHECK(cfg.memristor.k_reset == 9e4);
    const TransistorParams& t = cfg.controller.comparator.transistor;
    CHECK(t.k_prime == 450e-6);
    CHECK(t.w_over_l == 5.0);
    CHECK(t.v_t == 0.25);
    CHECK(t.law == SaturationLaw::linear);
    CHECK(t.v_dsat == 0.12);
    CHECK(cfg.controller.comparator.v_read == 0.5);
    CHECK(cfg.controller.comparator.v_set == 1.7);
    CHECK(cfg.controller.comparator.v_dth == 1.1);
    CHECK(cfg.controller.dt == 2e-8);
    CHECK(cfg.controller.t_max == 3e-5);
    CHECK(cfg.controller.v_stop == 0.35);
    CHECK(cfg.controller.stop_latency == 1e-7);
    CHECK(cfg.controller.v_reset_gate == 2.1);
    CHECK(cfg.controller.v_verify_gate == 1.8);
    CHECK(cfg.kind == ExperimentKind::array_demo);  // hyphen normalized
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.seed == 42);
    CHECK(cfg.sweep_lo == 0.4);
    CHECK(cfg.sweep_hi == 0.9);
    CHECK(cfg.sweep_step == 0.02);
    CHECK(cfg.lut_lo == 0.3);
    CHECK(cfg.lut_hi == 1.6);
    CHECK(cfg.lut_points == 32);
    CHECK(cfg.window_sweep_steps == 64);
    CHECK(cfg.probe_count == 50);
    CHECK(cfg.paper_literal);
    CHECK(cfg.job_file == "plan.job");
  }

  TEST_CASE("parse errors name the origin, line, and offender") {
    const std::string unknown_key = parse_error("[memristor]\nbogus = 1\n");
    CHECK(unknown_key.find("inline:2:") != std::string::npos);
    CHECK(unknown_key.find("bogus") != std::string::npos);

    CHECK(parse_error("[wat]\n").find("unknown section") != std::string::npos);
    CHECK(parse_error("[memristor]\ng_off = abc\n").find("not a finite number") !=
          std::string::npos);
    CHECK(parse_error("g_off = 1\n").find("outside any section") != std::string::npos);
    CHECK(parse_error("[memristor\n").find("unterminated") != std::string::npos);
    CHECK(parse_error("[memristor]\ng_off\n").find("key = value") != std::string::npos);
    CHECK(parse_error("[experiment]\nlut_points = 2.5\n").find("not an integer") !=
          std::string::npos);
  }

  TEST_CASE("experiment kinds round-trip through their names") {
    for (const ExperimentKind k : {ExperimentKind::cell_sweep, ExperimentKind::build_lut,
                                   ExperimentKind::array_demo, ExperimentKind::search_demo}) {
      CHECK(experiment_kind_from_name(experiment_kind_name(k)) == k);
    }
    CHECK(experiment_kind_from_name("cell-sweep") == ExperimentKind::cell_sweep);
    CHECK_THROWS_AS(experiment_kind_from_name("frobnicate"), ConfigError);
  }

  TEST_CASE("validation rejects each malformed experiment knob") {
    ExperimentConfig cfg;
    cfg.sweep_step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.sweep_lo = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.sweep_hi = 1.9;  // above the program rail
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.sweep_lo = 0.9;
    cfg.sweep_hi = 0.8;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.lut_lo = 0.2;
    cfg.lut_hi = 1.9;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.lut_points = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.window_sweep_steps = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.probe_count = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.out_dir.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("boolean and seed values accept the documented spellings only") {
    for (const char* v : {"true", "yes", "1"}) {
      CHECK(parse_str(std::string("[experiment]\npaper_literal = ") + v + "\n").paper_literal);
    }
    for (const char* v : {"false", "no", "0"}) {
      CHECK_FALSE(
          parse_str(std::string("[experiment]\npaper_literal = ") + v + "\n").paper_literal);
    }
    CHECK(parse_error("[experiment]\npaper_literal = maybe\n").find("not a boolean") !=
          std::string::npos);

    CHECK(parse_str("[experiment]\nseed = 18446744073709551615\n").seed ==
          18446744073709551615ull);
    CHECK(parse_error("[experiment]\nseed = -1\n").find("not an unsigned integer") !=
          std::string::npos);
  }

  TEST_CASE("loading a missing config file reports a configuration error") {
    CHECK_THROWS_AS(load_config("/tmp/acamsim_no_such_config.ini"), ConfigError);
  }
}

TEST_SUITE("jobs") {
  TEST_CASE("a job file parses into exactly the listed operations") {
    const std::string path = write_temp("job_ok",
                                        "# staging plan\n"
                                        "\n"
                                        "write 0 1 lb 5e-05\n"
                                        "window 1 0 1e-05 4e-05\n"
                                        "dont_care 2 1\n");
    const std::vector<JobOp> job = parse_job_file(path);
    std::remove(path.c_str());
    REQUIRE(job.size() == 3);

    CHECK(job[0].kind == JobOp::Kind::write);
    CHECK(job[0].row == 0);
    CHECK(job[0].col == 1);
    CHECK(job[0].side == CellSide::lb);
    CHECK(job[0].g == 5e-5);

    CHECK(job[1].kind == JobOp::Kind::window);
    CHECK(job[1].row == 1);
    CHECK(job[1].col == 0);
    CHECK(job[1].g_lo == 1e-5);
    CHECK(job[1].g_hi == 4e-5);

    CHECK(job[2].kind == JobOp::Kind::dont_care);
    CHECK(job[2].row == 2);
    CHECK(job[2].col == 1);
  }

  TEST_CASE("malformed job lines are rejected with their line number") {
    const auto expect_error = [](const char* tag, const std::string& content,
                                 const std::string& needle) {
      const std::string path = write_temp(tag, content);
      try {
        (void)parse_job_file(path);
        std::remove(path.c_str());
        FAIL("expected ConfigError for: ", content);
      } catch (const ConfigError& e) {
        std::remove(path.c_str());
        const std::string msg = e.what();
        CHECK(msg.find(needle) != std::string::npos);
        CHECK(msg.find(":2:") != std::string::npos);
      }
    };
    expect_error("job_side", "# plan\nwrite 0 1 xx 5e-05\n", "'lb' or 'hb'");
    expect_error("job_order", "# plan\nwindow 0 0 4e-05 1e-05\n", "g_lo <= g_hi");
    expect_error("job_extra", "# plan\nwrite 0 1 lb 5e-05 extra\n", "trailing field");
    expect_error("job_op", "# plan\nfrobnicate 1 2\n", "unknown op");
    expect_error("job_neg", "# plan\nwrite 0 1 lb -5e-05\n", "non-negative conductance");
    expect_error("job_int", "# plan\ndont_care x 1\n", "integer");
  }

  TEST_CASE("a missing job file reports a configuration error") {
    CHECK_THROWS_AS(parse_job_file("/tmp/acamsim_no_such_job.txt"), ConfigError);
  }

  TEST_CASE("the built-in demonstration covers the array with disjoint windows") {
    const std::vector<JobOp> job = default_demo_job();
    REQUIRE(job.size() == 8);
    for (int row = 0; row < 4; ++row) {
      for (int col = 0; col < 2; ++col) {
        int hits = 0;
        for (const JobOp& op : job) {
          if (op.row == row && op.col == col) {
            ++hits;
            CHECK(op.kind == JobOp::Kind::window);
            CHECK(op.g_lo > 0.0);
            CHECK(op.g_lo < op.g_hi);
            CHECK(op.g_hi <= 2e-4);
          }
        }
        CHECK(hits == 1);
      }
    }
    // Within each column the row windows must not overlap, or the one-hot
    // search demonstration could never work.
    for (int col = 0; col < 2; ++col) {
      double prev_hi = -1.0;
      for (const JobOp& op : job) {
        if (op.col != col) {
          continue;
        }
        CHECK(op.g_lo > prev_hi);
        prev_hi = op.g_hi;
      }
    }
  }
}

TEST_SUITE("numerics") {
  TEST_CASE("linear grids have exact endpoints and uniform spacing") {
    const std::vector<double> g = make_linear_grid(0.0, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.25);
    CHECK(g[2] == 0.5);
    CHECK(g[3] == 0.75);
    CHECK(g[4] == 1.0);
    const std::vector<double> awkward = make_linear_grid(0.34, 0.64, 31);
    CHECK(awkward.front() == 0.34);
    CHECK(awkward.back() == 0.64);
    CHECK_THROWS_AS(make_linear_grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_grid(1.0, 1.0, 5), std::invalid_argument);
  }

  TEST_CASE("polynomial fits recover exact polynomial data") {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i <= 6; ++i) {
      const double xi = 0.5 * i;
      x.push_back(xi);
      y.push_back(2.0 - 3.0 * xi + 0.5 * xi * xi);
    }
    const PolyFit fit = polyfit(x, y, 2);
    REQUIRE(fit.coeffs.size() == 3);
    CHECK(fit.coeffs[0] == doctest::Approx(2.0));
    CHECK(fit.coeffs[1] == doctest::Approx(-3.0));
    CHECK(fit.coeffs[2] == doctest::Approx(0.5));
    CHECK(fit.r_squared >= 0.999999);
  }

  TEST_CASE("polynomial fit input validation") {
    CHECK_THROWS_AS(polyfit({0, 1, 2}, {0, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(polyfit({0, 1}, {0, 1}, 2), std::invalid_argument);  // too few points
    CHECK_THROWS_AS(polyfit({0, 1, 2}, {0, 1, 2}, 5), std::invalid_argument);
    CHECK_THROWS_AS(polyfit({0, 1, 2}, {0, 1, 2}, -1), std::invalid_argument);
    CHECK_THROWS_AS(polyfit({1, 1, 1}, {0, 1, 2}, 1), SolverError);  // singular
  }

  TEST_CASE("constant data is a perfect fit, not a divide-by-zero") {
    const PolyFit fit = polyfit({0, 1, 2, 3, 4}, {4.25, 4.25, 4.25, 4.25, 4.25}, 1);
    CHECK(fit.r_squared == 1.0);
    CHECK(fit.coeffs[0] == doctest::Approx(4.25));
    CHECK(fit.coeffs[1] == 0.0);
  }

  TEST_CASE("the largest fit range finds the full linear stretch and nothing more") {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
      x.push_back(static_cast<double>(i));
      y.push_back(i < 10 ? static_cast<double>(i) : (i % 2 == 0 ? 50.0 : -50.0));
    }
    const auto r = largest_fit_range(x, y, 1, 0.98);
    REQUIRE(r.has_value());
    CHECK(r->begin == 0);
    CHECK(r->end == 10);
    CHECK(r->r_squared >= 0.98);
  }

  TEST_CASE("data with no acceptable window yields no range at all") {
    const std::vector<double> x{0, 1, 2, 3, 4, 5};
    const std::vector<double> y{50, -50, 50, -50, 50, -50};
    CHECK_FALSE(largest_fit_range(x, y, 1, 0.98).has_value());
    // Too few points for the minimum window is a clean miss, not an error.
    CHECK_FALSE(largest_fit_range({0, 1}, {0, 1}, 1, 0.5).has_value());
    CHECK_THROWS_AS(largest_fit_range({0, 1, 2}, {0, 1}, 1, 0.5), std::invalid_argument);
  }
}
