#pragma once

#include <stdexcept>
#include <string>

namespace limitset {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A ray failed to meet the spline boundary (only reachable through
/// floating-point loss on a valid spline).
class GeometryError : public std::runtime_error {
 public:
  GeometryError(const std::string& what, double angle)
      : std::runtime_error(what), angle_(angle) {}
  double angle() const noexcept { return angle_; }

 private:
  double angle_;
};

/// Failure inside the fit pipeline, tagged with the stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace limitset
