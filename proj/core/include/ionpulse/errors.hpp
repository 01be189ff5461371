#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ionpulse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (trap, layout, run config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Nonlinear root solve did not converge; carries the final residual norm.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A transverse mode has non-positive curvature: the linear chain buckles.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::size_t mode)
      : Error(what), mode_(mode) {}
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

/// A free parameter is outside its bounds; carries the entry index.
class ParameterError : public Error {
 public:
  ParameterError(const std::string& what, std::size_t entry)
      : Error(what), entry_(entry) {}
  std::size_t entry() const noexcept { return entry_; }

 private:
  std::size_t entry_;
};

/// Argument outside the domain of a function (e.g. sampling time).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Sideband frequency too close to zero for the closed forms.
class ResonanceError : public Error {
 public:
  ResonanceError(const std::string& what, std::size_t mode)
      : Error(what), mode_(mode) {}
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Truncated Hilbert space too large, or propagation failed.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace ionpulse
