#include "acamsim/csv.hpp"

#include <cstdio>

#include "acamsim/errors.hpp"

namespace acamsim {

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ============================================================================
// CsvFile
// ============================================================================

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), path_(path), n_cols_(columns.size()) {
  if (!out_) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  if (columns.empty()) {
    throw std::invalid_argument("CsvFile: need at least one column");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    out_ << columns[i];
  }
  out_ << '\n';
}

CsvFile::~CsvFile() {
  if (!closed_) {
    out_.flush();
  }
}

void CsvFile::comment(const std::string& text) {
  if (closed_) {
    throw ConfigError("CsvFile: '" + path_ + "' already closed");
  }
  out_ << "# " << text << '\n';
}

void CsvFile::row(const std::vector<std::string>& fields) {
  if (closed_) {
    throw ConfigError("CsvFile: '" + path_ + "' already closed");
  }
  if (fields.size() != n_cols_) {
    throw std::invalid_argument("CsvFile: row with " + std::to_string(fields.size()) +
                                " fields against a " + std::to_string(n_cols_) +
                                "-column header in '" + path_ + "'");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvFile::close() {
  if (closed_) {
    return;
  }
  out_.flush();
  if (!out_) {
    throw ConfigError("write to '" + path_ + "' failed");
  }
  out_.close();
  closed_ = true;
}

// ============================================================================
// Trace export
// ============================================================================

void write_trace_csv(const std::string& path, const ProgramResult& result) {
  CsvFile csv(path, {"t", "v_out", "v_mid", "g_mem", "mode"});
  for (const TraceSample& s : result.trace) {
    csv.row({csv_num(s.t), csv_num(s.v_out), csv_num(s.v_mid), csv_num(s.g_mem),
             periphery_mode_name(s.mode)});
  }
  csv.close();
}

}  // namespace acamsim
