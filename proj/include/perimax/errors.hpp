#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace perimax {

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::optional<int> element = std::nullopt)
      : std::runtime_error(element ? what + " (element " + std::to_string(*element) + ")" : what),
        element_(element) {}

  /// Id of the offending vertex, edge or face, when one is known.
  std::optional<int> element() const noexcept { return element_; }

 private:
  std::optional<int> element_;
};

/// Malformed input: schema violations, invalid placements, unmet preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when a stress cannot be integrated into a periodic lifting.
class NotPeriodicStress : public ValidationError {
 public:
  NotPeriodicStress(const std::string& what, double residual)
      : ValidationError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace perimax
