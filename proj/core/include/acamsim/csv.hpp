#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "acamsim/controller.hpp"

namespace acamsim {

// ============================================================================
// Deterministic CSV emission
// ============================================================================

/// Formats a double with 12 significant digits — enough that reruns of the
/// same experiment produce byte-identical files.
[[nodiscard]] std::string csv_num(double v);

/// Column-checked CSV writer. Throws ConfigError on any I/O failure and on
/// rows whose field count disagrees with the header.
class CsvFile {
 public:
  CsvFile(const std::string& path, const std::vector<std::string>& columns);
  ~CsvFile();
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  /// Writes one line verbatim prefixed with '#', before or between rows.
  void comment(const std::string& text);
  void row(const std::vector<std::string>& fields);
  /// Flushes and verifies the stream; further writes are rejected.
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t n_cols_;
  bool closed_ = false;
};

/// Writes a programming episode's trace with channels
/// `t,v_out,v_mid,g_mem,mode`.
void write_trace_csv(const std::string& path, const ProgramResult& result);

}  // namespace acamsim
