#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

// Argument validation uses std::invalid_argument and std::domain_error
// directly; the types below cover solver and data failures.

/// Raised when the semismooth Newton line search cannot find an Armijo step.
/// `diagnostics()` holds a JSON object describing the failing iterate.
class SolverStall : public std::runtime_error {
 public:
  SolverStall(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// The design restricted to a support does not have full column rank.
class SingularDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An outer iterate has all groups equal to zero, so the penalty schedule
/// (which divides by the largest group norm) is undefined.
class DegenerateIterate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsr
