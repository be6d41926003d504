#pragma once

#include <stdexcept>
#include <string>

namespace mwsim {

/// Process exit codes surfaced by the CLI.
enum class ErrorCode : int {
  ok = 0,
  config = 2,
  numerical = 3,
  empty_ensemble = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::config, what) {}
};

/// Inconsistent configuration (bad geometry, malformed config text, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

/// Operation not defined for the given species (e.g. fields for neutrals).
class UnsupportedOperation : public Error {
 public:
  explicit UnsupportedOperation(const std::string& what)
      : Error(ErrorCode::config, what) {}
};

/// Sampling too coarse for the oscillatory Fresnel kernel.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, long required_samples)
      : Error(ErrorCode::numerical, what), required_samples_(required_samples) {}
  [[nodiscard]] long required_samples() const noexcept { return required_samples_; }

 private:
  long required_samples_;
};

/// Quadrature failed to converge or an approximation left its validity range.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCode::numerical, what) {}
};

/// Every Monte Carlo sample was culled.
class EmptyEnsemble : public Error {
 public:
  explicit EmptyEnsemble(const std::string& what)
      : Error(ErrorCode::empty_ensemble, what) {}
};

}  // namespace mwsim
