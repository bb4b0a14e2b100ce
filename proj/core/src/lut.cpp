#include "acamsim/lut.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acamsim/errors.hpp"

namespace acamsim {

namespace {

std::string format_si(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_mix(std::uint64_t& h, std::uint64_t bits) {
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
}

void fnv_mix(std::uint64_t& h, double v) { fnv_mix(h, std::bit_cast<std::uint64_t>(v)); }

}  // namespace

// ============================================================================
// Fingerprint and closed-form boundary inverse
// ============================================================================

std::uint64_t params_fingerprint(const ComparatorParams& cmp, const MemristorParams& mem) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, cmp.transistor.k_prime);
  fnv_mix(h, cmp.transistor.w_over_l);
  fnv_mix(h, cmp.transistor.v_t);
  fnv_mix(h, cmp.transistor.v_dsat);
  fnv_mix(h, static_cast<std::uint64_t>(cmp.transistor.law));
  fnv_mix(h, cmp.v_read);
  fnv_mix(h, cmp.v_set);
  fnv_mix(h, cmp.v_dth);
  fnv_mix(h, mem.g_off);
  fnv_mix(h, mem.g_on);
  fnv_mix(h, mem.v_th_set);
  fnv_mix(h, mem.v_th_reset);
  fnv_mix(h, mem.k_set);
  fnv_mix(h, mem.k_reset);
  return h;
}

ConductanceReading g_of_vdlp(const ComparatorParams& cmp, const MemristorParams& mem, Volts v_dlp,
                             EquationVariant variant) {
  cmp.validate();
  mem.validate();
  if (cmp.transistor.law != SaturationLaw::quadratic) {
    throw std::invalid_argument(
        "g_of_vdlp: the closed-form boundary inverse is defined for the quadratic saturation "
        "law only");
  }
  if (!std::isfinite(v_dlp) || v_dlp < 0.0 || v_dlp > cmp.v_set) {
    throw std::invalid_argument("g_of_vdlp: v_dlp must lie in [0, v_set]");
  }
  const double kwl = cmp.transistor.k_prime * cmp.transistor.w_over_l;
  const double v_ov = std::max(0.0, v_dlp - cmp.transistor.v_t);
  Siemens g = kwl * v_ov * v_ov / (2.0 * (cmp.v_set - cmp.v_dth));
  if (variant == EquationVariant::paper_literal) {
    g -= kwl * 0.75 * cmp.v_read;
  }
  ConductanceReading r;
  r.value = g;
  r.below_range = g < mem.g_off;
  r.above_range = g > mem.g_on;
  return r;
}

// ============================================================================
// Table type
// ============================================================================

Siemens LutTable::g_min() const {
  validate();
  return entries.front().g_mem;
}

Siemens LutTable::g_max() const {
  validate();
  return entries.back().g_mem;
}

Volts LutTable::v_min() const {
  validate();
  return entries.front().v_dlp;
}

Volts LutTable::v_max() const {
  validate();
  return entries.back().v_dlp;
}

void LutTable::validate() const {
  if (entries.empty()) {
    throw std::invalid_argument("LutTable: no entries");
  }
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!(entries[i].v_dlp > entries[i - 1].v_dlp)) {
      throw std::invalid_argument("LutTable: entries must be strictly increasing in v_dlp");
    }
    if (!(entries[i].g_mem > entries[i - 1].g_mem)) {
      throw std::invalid_argument("LutTable: entries must be strictly increasing in g_mem");
    }
  }
}

// ============================================================================
// Building
// ============================================================================

std::vector<Volts> default_lut_grid(const ComparatorParams& cmp) {
  cmp.validate();
  const Volts lo = cmp.transistor.v_t + 0.05;
  const Volts hi = cmp.v_set - 0.05;
  if (!(lo < hi)) {
    throw std::invalid_argument("default_lut_grid: degenerate voltage span");
  }
  constexpr int kPoints = 64;
  std::vector<Volts> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
  }
  return grid;
}

LutTable build_lut(const ControllerConfig& cfg, const MemristorParams& mem,
                   const std::vector<Volts>& grid, LutMethod method, EquationVariant variant) {
  cfg.validate();
  mem.validate();
  const ComparatorParams& cmp = cfg.comparator;
  if (grid.empty()) {
    throw ConfigError("build_lut: empty voltage grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0 || grid[i] > cmp.v_set) {
      throw ConfigError("build_lut: grid voltages must lie in [0, v_set]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ConfigError("build_lut: grid must be strictly increasing");
    }
  }

  LutTable table;
  table.fingerprint = params_fingerprint(cmp, mem);

  if (method == LutMethod::analytic) {
    table.provenance = variant == EquationVariant::paper_literal
                           ? LutProvenance::analytic_paper_literal
                           : LutProvenance::analytic_consistent;
    for (const Volts v : grid) {
      const ConductanceReading r = g_of_vdlp(cmp, mem, v, variant);
      if (r.below_range) {
        table.trimmed_low.push_back({v, r.value});
      } else if (r.above_range) {
        table.trimmed_high.push_back({v, r.value});
      } else {
        table.entries.push_back({v, r.value});
      }
    }
  } else {
    table.provenance = LutProvenance::simulated;
    for (const Volts v : grid) {
      MemristorState fresh;
      fresh.params = mem;
      fresh.w = 0.0;
      const ProgramResult r = run_set(fresh, v, cfg);
      table.entries.push_back({v, r.final_g});
    }
    // Episodes below the usable range stop immediately at g_off and episodes
    // past it clip at g_on, so the raw column is a plateau, a strictly rising
    // stretch, then another plateau. Trim each plateau down to the knot
    // adjacent to the rising stretch.
    auto& e = table.entries;
    while (e.size() >= 2 && !(e[0].g_mem < e[1].g_mem)) {
      table.trimmed_low.push_back(e.front());
      e.erase(e.begin());
    }
    while (e.size() >= 2 && !(e[e.size() - 2].g_mem < e.back().g_mem)) {
      table.trimmed_high.push_back(e.back());
      e.pop_back();
    }
    std::reverse(table.trimmed_high.begin(), table.trimmed_high.end());
  }

  if (table.entries.empty()) {
    throw ConfigError("build_lut: no grid point lands in the usable conductance range [" +
                      format_si(mem.g_off) + ", " + format_si(mem.g_on) + "] S");
  }
  table.validate();
  return table;
}

// ============================================================================
// Inversion and fingerprint checks
// ============================================================================

Volts vdlp_for_target(const LutTable& table, Siemens g_target) {
  table.validate();
  if (!std::isfinite(g_target) || g_target < table.entries.front().g_mem ||
      g_target > table.entries.back().g_mem) {
    throw OutOfRangeError("vdlp_for_target: target " + format_si(g_target) +
                          " S outside the table's achievable range [" +
                          format_si(table.entries.front().g_mem) + ", " +
                          format_si(table.entries.back().g_mem) + "] S");
  }
  const auto it = std::lower_bound(
      table.entries.begin(), table.entries.end(), g_target,
      [](const LutEntry& e, Siemens g) { return e.g_mem < g; });
  if (it->g_mem == g_target) {
    return it->v_dlp;
  }
  const LutEntry& hi = *it;
  const LutEntry& lo = *(it - 1);
  const double f = (g_target - lo.g_mem) / (hi.g_mem - lo.g_mem);
  return lo.v_dlp + f * (hi.v_dlp - lo.v_dlp);
}

void require_fingerprint(const LutTable& table, const ComparatorParams& cmp,
                         const MemristorParams& mem) {
  const std::uint64_t live = params_fingerprint(cmp, mem);
  if (table.fingerprint != live) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "table %016llx vs live %016llx",
                  static_cast<unsigned long long>(table.fingerprint),
                  static_cast<unsigned long long>(live));
    throw FingerprintError(std::string("lookup table built for different parameters: ") + buf);
  }
}

// ============================================================================
// CSV round trip
// ============================================================================

namespace {

const char* provenance_name(LutProvenance p) {
  switch (p) {
    case LutProvenance::analytic_consistent:
      return "analytic_consistent";
    case LutProvenance::analytic_paper_literal:
      return "analytic_paper_literal";
    case LutProvenance::simulated:
      return "simulated";
  }
  return "unknown";
}

LutProvenance provenance_from_name(const std::string& s) {
  if (s == "analytic_consistent") return LutProvenance::analytic_consistent;
  if (s == "analytic_paper_literal") return LutProvenance::analytic_paper_literal;
  if (s == "simulated") return LutProvenance::simulated;
  throw ConfigError("unknown table provenance '" + s + "'");
}

}  // namespace

void write_lut_csv(const LutTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("write_lut_csv: cannot open '" + path + "' for writing");
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# fingerprint=%016llx\n",
                static_cast<unsigned long long>(table.fingerprint));
  out << buf;
  out << "# provenance=" << provenance_name(table.provenance) << "\n";
  out << "v_dlp_volts,g_mem_siemens\n";
  for (const LutEntry& e : table.entries) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", e.v_dlp, e.g_mem);
    out << buf;
  }
  if (!out) {
    throw ConfigError("write_lut_csv: write to '" + path + "' failed");
  }
}

LutTable read_lut_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("read_lut_csv: cannot open '" + path + "'");
  }
  LutTable table;
  bool have_fingerprint = false;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(1, eq - 1);
        const std::string value = line.substr(eq + 1);
        if (key.find("fingerprint") != std::string::npos) {
          table.fingerprint = std::stoull(value, nullptr, 16);
          have_fingerprint = true;
        } else if (key.find("provenance") != std::string::npos) {
          table.provenance = provenance_from_name(value);
        }
      }
      continue;
    }
    if (!have_header) {
      if (line != "v_dlp_volts,g_mem_siemens") {
        throw ConfigError("read_lut_csv: unexpected header '" + line + "' in '" + path + "'");
      }
      have_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string v_field;
    std::string g_field;
    if (!std::getline(row, v_field, ',') || !std::getline(row, g_field)) {
      throw ConfigError("read_lut_csv: malformed row at line " + std::to_string(line_no) +
                        " of '" + path + "'");
    }
    try {
      table.entries.push_back({std::stod(v_field), std::stod(g_field)});
    } catch (const std::exception&) {
      throw ConfigError("read_lut_csv: non-numeric row at line " + std::to_string(line_no) +
                        " of '" + path + "'");
    }
  }
  if (!have_fingerprint || !have_header) {
    throw ConfigError("read_lut_csv: '" + path + "' is missing the fingerprint or header line");
  }
  table.validate();
  return table;
}

}  // namespace acamsim
