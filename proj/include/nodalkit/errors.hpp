#pragma once

#include <stdexcept>
#include <string>

namespace nodalkit {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The field variance vanishes at the requested point (equator, or pole for even degree).
class DegenerateVarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative or adaptive numerics failed to converge. Carries a JSON diagnostic blob.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::string diagnostics_json = "{}")
      : std::runtime_error(what), diagnostics_(std::move(diagnostics_json)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

// Grid too coarse for reliable nodal extraction.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nodalkit
