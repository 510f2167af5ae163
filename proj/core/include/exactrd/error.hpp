#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exactrd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the problem.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Identifier that is neither `t`, a known constant, nor a known function.
class UnknownIdentifierError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// Function called with the wrong number of arguments, or used without a call.
class ArityError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// An expression was evaluated outside its domain (ln of a non-positive
/// number, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& node, double t)
      : Error("domain violation in '" + node + "' at t=" + std::to_string(t)),
        node_(node),
        t_(t) {}
  const std::string& node() const noexcept { return node_; }
  double t() const noexcept { return t_; }

 private:
  std::string node_;
  double t_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not make progress (step-size underflow,
/// non-finite state).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// The characteristic solution mu0 has a turning point (mu0' = 0) inside the
/// working interval while the kernel quadratures need 1/mu0'.
class TurningPointError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Evaluation requested at a point where a kernel function is singular.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration that is unreadable or violates the schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested beyond a finite-time blow-up of a Riccati state.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

}  // namespace exactrd
