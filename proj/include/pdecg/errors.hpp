#pragma once

#include <stdexcept>
#include <string>

namespace pdecg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unsupported configuration (bad key, forbidden sensing/actuation pair, stability bound).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad argument to an operation (length mismatch, non-finite action, out-of-range position).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operation not allowed in the current state (e.g. stepping a finished episode).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Iterative method exhausted its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A rollout produced non-finite or runaway values.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// External controller violated the line protocol or timed out.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdecg
