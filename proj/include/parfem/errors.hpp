#pragma once

#include <stdexcept>
#include <string>

namespace parfem {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Message fabric failure: watchdog timeout, aborted peer, bad endpoint.
struct TransportError : Error {
  explicit TransportError(const std::string& what) : Error(what) {}
};

/// A received (global cell number, cell dof index) pair has no local
/// counterpart. Signals a partitioning or halo-pruning bug; not recoverable.
struct UnmatchedDofError : Error {
  explicit UnmatchedDofError(const std::string& what) : Error(what) {}
};

/// Smoother hit a zero diagonal entry.
struct SingularDiagonalError : Error {
  explicit SingularDiagonalError(const std::string& what) : Error(what) {}
};

/// An iterative solve exhausted its iteration budget.
struct NoConvergenceError : Error {
  explicit NoConvergenceError(const std::string& what) : Error(what) {}
};

/// Bad configuration file or option value.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// File could not be read or written.
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace parfem
