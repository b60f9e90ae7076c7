#pragma once

#include <stdexcept>
#include <string>

namespace sfflab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (parameter out of range,
/// malformed input, schedule outside the run window, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Spectra carrying different frame tags were combined.
class FrameMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A numerical routine failed to deliver its contract (solver
/// non-convergence, accuracy check failed, ...).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sfflab
