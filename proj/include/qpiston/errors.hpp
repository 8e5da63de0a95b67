#pragma once

#include <stdexcept>
#include <string>

namespace qpiston {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The wall trajectory reaches zero size inside a requested time window.
class SingularMotionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive integrator could not make progress; carries the time reached.
class StepSizeUnderflow : public std::runtime_error {
 public:
  StepSizeUnderflow(const std::string& what, double time_reached)
      : std::runtime_error(what), time_reached_(time_reached) {}
  double time_reached() const noexcept { return time_reached_; }

 private:
  double time_reached_;
};

/// A work-experiment cell failed; carries the wall speed of that cell.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& what, double speed)
      : std::runtime_error(what), speed_(speed) {}
  double speed() const noexcept { return speed_; }

 private:
  double speed_;
};

}  // namespace qpiston
