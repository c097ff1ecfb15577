// Exception hierarchy shared by all qflow modules.
//
// Everything derives from qflow::Error (itself a std::runtime_error) so callers
// can catch library failures in one place while still discriminating by kind.

#pragma once

#include <stdexcept>
#include <string>

namespace qflow {

// Base class for all qflow exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid value in an otherwise well-formed request (site outside the lattice,
// unnormalized state, non-decreasing tail values, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Inconsistent object construction (dimension mismatch, unknown family,
// support violation, ...).
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& msg) : Error(msg) {}
};

// Ground-state degeneracy detected while diagonalizing along the path.
// Carries the parameter value at which the gap closed.
class GapClosedError : public Error {
 public:
  GapClosedError(double s, const std::string& msg) : Error(msg), s_value(s) {}
  double s_value;
};

// A pipeline stage was invoked before the stage that produces its inputs.
class DependencyError : public Error {
 public:
  explicit DependencyError(const std::string& msg) : Error(msg) {}
};

// Cached artifacts in the output directory were produced by a different
// configuration (hash mismatch).
class StaleCacheError : public Error {
 public:
  explicit StaleCacheError(const std::string& msg) : Error(msg) {}
};

// The 1/2-threshold scan for the entropy bound found no feasible width.
class NoFeasibleR0Error : public Error {
 public:
  explicit NoFeasibleR0Error(const std::string& msg) : Error(msg) {}
};

}  // namespace qflow
