#pragma once

#include <stdexcept>
#include <string>

namespace survscore {

/// Base class for all survscore errors. Subclasses map to CLI exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad inputs: malformed files, schema mismatches, invalid parameters. Exit code 1.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Numerical failures: non-convergence, degenerate designs, undefined metrics. Exit code 2.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Filesystem failures. Exit code 3.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace survscore
