#pragma once

#include <stdexcept>
#include <string>

namespace acamsim {

/// Bracketed root finder could not converge or had no sign change.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested voltage or conductance falls outside the achievable range.
/// The message names the achievable range so callers can adjust.
class OutOfRangeError : public std::runtime_error {
 public:
  explicit OutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// A programming request arrived while the single shared programming
/// circuit was already busy with another cell.
class ContentionError : public std::runtime_error {
 public:
  explicit ContentionError(const std::string& what) : std::runtime_error(what) {}
};

/// Both periphery control lines asserted at once.
class InvalidControlError : public std::runtime_error {
 public:
  explicit InvalidControlError(const std::string& what) : std::runtime_error(what) {}
};

/// Lookup table built under different device or circuit parameters.
class FingerprintError : public std::runtime_error {
 public:
  explicit FingerprintError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file or job file could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A cell produced a non-contiguous match pattern during a sweep,
/// which indicates an inverted or corrupted window.
class CellFaultError : public std::runtime_error {
 public:
  explicit CellFaultError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acamsim
