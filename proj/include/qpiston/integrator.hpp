#pragma once

// Dormand-Prince 8(5,3) adaptive Runge-Kutta stepper for complex-valued
// systems y' = f(t, y), with the step-size control of Hairer's DOP853.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace qpiston {

using ComplexVector = std::vector<std::complex<double>>;
using RhsFunction = std::function<void(double t, const ComplexVector& y, ComplexVector& dydt)>;

struct StepperOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects one automatically
  std::size_t max_steps = 100'000'000;
};

struct StepperStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

class Dop853 {
 public:
  Dop853(std::size_t dimension, StepperOptions options);

  /// Advances (t, y) to t_end in either direction. on_step runs after every
  /// accepted step; accepted step sizes are appended to steps if non-null.
  void integrate(const RhsFunction& f, double& t, ComplexVector& y, double t_end,
                 std::vector<double>* steps = nullptr,
                 const std::function<void(double, const ComplexVector&)>& on_step = {});

  /// One eighth-order step of size h without error control.
  void step(const RhsFunction& f, double t, ComplexVector& y, double h);

  const StepperStats& stats() const noexcept { return stats_; }

 private:
  // Stages for a step of size h from (t, y) given k_[0] = f(t, y). Leaves the
  // eighth-order solution in y_new_ and returns the scaled error norm.
  double attempt(const RhsFunction& f, double t, const ComplexVector& y, double h);
  double initial_step(const RhsFunction& f, double t, const ComplexVector& y, double direction);

  std::size_t n_;
  StepperOptions options_;
  StepperStats stats_;
  std::vector<ComplexVector> k_;
  ComplexVector work_, y_new_;
};

}  // namespace qpiston
