#pragma once

#include <stdexcept>
#include <string>

namespace wavebal {

/// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent configuration input (maps to exit code 2).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A numerical procedure failed or a mathematical precondition was violated
/// at run time (maps to exit code 3).
struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(what) {}
};

/// Exact-arithmetic computation exceeded the 128-bit budget (maps to exit
/// code 4). Exact mode is sized for transition matrices of dimension up to
/// 16 (N <= 8); beyond that this error is expected behavior, not a bug.
struct ExactOverflow : Error {
  explicit ExactOverflow(const std::string& what) : Error(what) {}
};

}  // namespace wavebal
