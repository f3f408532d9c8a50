#pragma once

#include <stdexcept>
#include <string>

namespace qaoaplus {

// Base of every error thrown by the library. The CLI maps InputError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something that violates a precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a fixed memory guard (e.g. more than 24 qubits).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Random graph sampling ran out of its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Every optimizer restart failed.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

// A computed quantity left its mathematically admissible range.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qaoaplus
