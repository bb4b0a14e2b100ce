#include "acamsim/config.hpp"

#include <cctype>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "acamsim/errors.hpp"

namespace acamsim {

// ============================================================================
// Experiment kinds
// ============================================================================

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::cell_sweep:
      return "cell_sweep";
    case ExperimentKind::build_lut:
      return "build_lut";
    case ExperimentKind::array_demo:
      return "array_demo";
    case ExperimentKind::search_demo:
      return "search_demo";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  std::string s = name;
  for (char& ch : s) {
    if (ch == '-') {
      ch = '_';
    }
  }
  if (s == "cell_sweep") return ExperimentKind::cell_sweep;
  if (s == "build_lut") return ExperimentKind::build_lut;
  if (s == "array_demo") return ExperimentKind::array_demo;
  if (s == "search_demo") return ExperimentKind::search_demo;
  throw ConfigError("unknown experiment kind '" + name +
                    "' (expected cell_sweep, build_lut, array_demo, or search_demo)");
}

// ============================================================================
// Validation
// ============================================================================

void ExperimentConfig::validate() const {
  memristor.validate();
  controller.validate();
  const Volts v_set = controller.comparator.v_set;
  if (!(sweep_step > 0.0) || !std::isfinite(sweep_step)) {
    throw ConfigError("experiment.sweep_step must be positive");
  }
  if (!(sweep_lo >= 0.0) || !(sweep_hi >= sweep_lo) || sweep_hi > v_set) {
    throw ConfigError("experiment sweep grid must satisfy 0 <= sweep_lo <= sweep_hi <= v_set");
  }
  if (lut_lo < lut_hi && (lut_lo < 0.0 || lut_hi > v_set)) {
    throw ConfigError("experiment lut grid must lie within [0, v_set]");
  }
  if (lut_points < 2) {
    throw ConfigError("experiment.lut_points must be at least 2");
  }
  if (window_sweep_steps < 2) {
    throw ConfigError("experiment.window_sweep_steps must be at least 2");
  }
  if (probe_count < 1) {
    throw ConfigError("experiment.probe_count must be at least 1");
  }
  if (out_dir.empty()) {
    throw ConfigError("experiment.out_dir must not be empty");
  }
}

// ============================================================================
// Parsing
// ============================================================================

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) {
    ++b;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) {
    --e;
  }
  return s.substr(b, e - b);
}

class Parser {
 public:
  Parser(ExperimentConfig& cfg, std::string origin) : cfg_(cfg), origin_(std::move(origin)) {}

  void consume(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') {
        continue;
      }
      if (t.front() == '[') {
        if (t.back() != ']') {
          fail("unterminated section header");
        }
        section_ = trim(t.substr(1, t.size() - 2));
        if (section_ != "memristor" && section_ != "transistor" && section_ != "comparator" &&
            section_ != "controller" && section_ != "experiment") {
          fail("unknown section '" + section_ + "'");
        }
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        fail("expected 'key = value'");
      }
      if (section_.empty()) {
        fail("key outside any section");
      }
      apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + what);
  }

  double number(const std::string& key, const std::string& value) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size() || !std::isfinite(v)) {
        throw std::invalid_argument("trailing characters");
      }
      return v;
    } catch (const std::exception&) {
      fail("value '" + value + "' for " + key + " is not a finite number");
    }
  }

  int integer(const std::string& key, const std::string& value) const {
    try {
      std::size_t pos = 0;
      const long v = std::stol(value, &pos);
      if (pos != value.size() || v < INT_MIN || v > INT_MAX) {
        throw std::invalid_argument("range");
      }
      return static_cast<int>(v);
    } catch (const std::exception&) {
      fail("value '" + value + "' for " + key + " is not an integer");
    }
  }

  std::uint64_t unsigned64(const std::string& key, const std::string& value) const {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(value, &pos);
      if (pos != value.size() || value.find('-') != std::string::npos) {
        throw std::invalid_argument("trailing characters");
      }
      return v;
    } catch (const std::exception&) {
      fail("value '" + value + "' for " + key + " is not an unsigned integer");
    }
  }

  bool boolean(const std::string& key, const std::string& value) const {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    fail("value '" + value + "' for " + key + " is not a boolean");
  }

  void apply(const std::string& key, const std::string& value) {
    if (section_ == "memristor") {
      MemristorParams& m = cfg_.memristor;
      if (key == "g_off") m.g_off = number(key, value);
      else if (key == "g_on") m.g_on = number(key, value);
      else if (key == "v_th_set") m.v_th_set = number(key, value);
      else if (key == "v_th_reset") m.v_th_reset = number(key, value);
      else if (key == "k_set") m.k_set = number(key, value);
      else if (key == "k_reset") m.k_reset = number(key, value);
      else fail("unknown key '" + key + "' in [memristor]");
    } else if (section_ == "transistor") {
      TransistorParams& t = cfg_.controller.comparator.transistor;
      if (key == "k_prime") t.k_prime = number(key, value);
      else if (key == "w_over_l") t.w_over_l = number(key, value);
      else if (key == "v_t") t.v_t = number(key, value);
      else if (key == "v_dsat") t.v_dsat = number(key, value);
      else if (key == "law") {
        if (value == "quadratic") t.law = SaturationLaw::quadratic;
        else if (value == "linear") t.law = SaturationLaw::linear;
        else fail("law must be 'quadratic' or 'linear', got '" + value + "'");
      } else fail("unknown key '" + key + "' in [transistor]");
    } else if (section_ == "comparator") {
      ComparatorParams& c = cfg_.controller.comparator;
      if (key == "v_read") c.v_read = number(key, value);
      else if (key == "v_set") c.v_set = number(key, value);
      else if (key == "v_dth") c.v_dth = number(key, value);
      else fail("unknown key '" + key + "' in [comparator]");
    } else if (section_ == "controller") {
      ControllerConfig& c = cfg_.controller;
      if (key == "dt") c.dt = number(key, value);
      else if (key == "t_max") c.t_max = number(key, value);
      else if (key == "v_stop") c.v_stop = number(key, value);
      else if (key == "stop_latency") c.stop_latency = number(key, value);
      else if (key == "v_reset_gate") c.v_reset_gate = number(key, value);
      else if (key == "v_verify_gate") c.v_verify_gate = number(key, value);
      else fail("unknown key '" + key + "' in [controller]");
    } else if (section_ == "experiment") {
      ExperimentConfig& e = cfg_;
      if (key == "kind") {
        try {
          e.kind = experiment_kind_from_name(value);
        } catch (const ConfigError& err) {
          fail(err.what());
        }
      } else if (key == "out_dir") e.out_dir = value;
      else if (key == "seed") e.seed = unsigned64(key, value);
      else if (key == "sweep_lo") e.sweep_lo = number(key, value);
      else if (key == "sweep_hi") e.sweep_hi = number(key, value);
      else if (key == "sweep_step") e.sweep_step = number(key, value);
      else if (key == "lut_lo") e.lut_lo = number(key, value);
      else if (key == "lut_hi") e.lut_hi = number(key, value);
      else if (key == "lut_points") e.lut_points = integer(key, value);
      else if (key == "window_sweep_steps") e.window_sweep_steps = integer(key, value);
      else if (key == "probe_count") e.probe_count = integer(key, value);
      else if (key == "paper_literal") e.paper_literal = boolean(key, value);
      else if (key == "job_file") e.job_file = value;
      else fail("unknown key '" + key + "' in [experiment]");
    }
  }

  ExperimentConfig& cfg_;
  std::string origin_;
  std::string section_;
  std::size_t line_ = 0;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  Parser parser(cfg, origin);
  parser.consume(in);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  return parse_config(in, path);
}

// ============================================================================
// Echo
// ============================================================================

std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  const auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.12g\n", key, v);
    out << buf;
  };
  out << "[memristor]\n";
  num("g_off", cfg.memristor.g_off);
  num("g_on", cfg.memristor.g_on);
  num("v_th_set", cfg.memristor.v_th_set);
  num("v_th_reset", cfg.memristor.v_th_reset);
  num("k_set", cfg.memristor.k_set);
  num("k_reset", cfg.memristor.k_reset);
  const TransistorParams& t = cfg.controller.comparator.transistor;
  out << "\n[transistor]\n";
  num("k_prime", t.k_prime);
  num("w_over_l", t.w_over_l);
  num("v_t", t.v_t);
  out << "law = " << (t.law == SaturationLaw::quadratic ? "quadratic" : "linear") << "\n";
  num("v_dsat", t.v_dsat);
  const ComparatorParams& c = cfg.controller.comparator;
  out << "\n[comparator]\n";
  num("v_read", c.v_read);
  num("v_set", c.v_set);
  num("v_dth", c.v_dth);
  out << "\n[controller]\n";
  num("dt", cfg.controller.dt);
  num("t_max", cfg.controller.t_max);
  num("v_stop", cfg.controller.v_stop);
  num("stop_latency", cfg.controller.stop_latency);
  num("v_reset_gate", cfg.controller.v_reset_gate);
  num("v_verify_gate", cfg.controller.v_verify_gate);
  out << "\n[experiment]\n";
  out << "kind = " << experiment_kind_name(cfg.kind) << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  std::snprintf(buf, sizeof(buf), "seed = %llu\n", static_cast<unsigned long long>(cfg.seed));
  out << buf;
  num("sweep_lo", cfg.sweep_lo);
  num("sweep_hi", cfg.sweep_hi);
  num("sweep_step", cfg.sweep_step);
  num("lut_lo", cfg.lut_lo);
  num("lut_hi", cfg.lut_hi);
  out << "lut_points = " << cfg.lut_points << "\n";
  out << "window_sweep_steps = " << cfg.window_sweep_steps << "\n";
  out << "probe_count = " << cfg.probe_count << "\n";
  out << "paper_literal = " << (cfg.paper_literal ? "true" : "false") << "\n";
  out << "job_file = " << cfg.job_file << "\n";
  return out.str();
}

}  // namespace acamsim
