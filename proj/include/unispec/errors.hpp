#pragma once

#include <stdexcept>
#include <string>

namespace unispec {

// Exception hierarchy. The CLI maps each family onto an exit code:
// InvalidArgument -> 1, DataError -> 2, SolverError -> 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on an API argument (shape, range, flag value).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be used: non-finite entries, asymmetry, ragged CSV,
// degenerate samples, corrupted cache files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a solver (factorization, loss of feasibility).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Raised by spd_solve when Cholesky meets a non-positive pivot.
class FactorizationError : public SolverError {
 public:
  FactorizationError(const std::string& what, long pivot)
      : SolverError(what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

// Kernel cache file that cannot be decoded.
class CacheFormatError : public DataError {
 public:
  enum class Kind { io, bad_magic, bad_version, bad_header, dimension_mismatch, truncated };

  CacheFormatError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace unispec
