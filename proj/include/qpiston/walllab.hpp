#pragma once

// The moving-wall work experiment: displace the wall by dl at speed v, take
// the work from the evolved expected energy, and compare it with -F dl and
// with the initial rate times dt.

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qpiston/basis.hpp"
#include "qpiston/dynamics.hpp"

namespace qpiston {

using CoefficientList = std::vector<std::pair<ModeIndex, std::complex<double>>>;

struct WorkExperiment {
  WellGeometry geometry{Dimension::segment1D, 1.0, 0.0};  // the speed entry is ignored
  PhysicalConstants constants;
  CoefficientList initial;
  Truncation truncation;  // base truncation N; the report also runs 2N (n_max doubled)
  double displacement = 1e-4;  // wall travel |dl|, at most 1e-3 of the initial size
  std::vector<double> speeds{0.1};
  /// Wall travels for the order study; empty selects {1, 1/2, 1/4} x 1e-3 of the size.
  std::vector<double> scaling_displacements;
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 100'000'000;  // per evolution

  void validate() const;
};

/// One evolution: speed, displacement and truncation.
struct WorkCell {
  double speed = 0.0;
  double displacement = 0.0;  // |dl|
  double duration = 0.0;      // dt = |dl| / |v|
  int n_max = 0;
  double measured_work = 0.0;  // E(dt) - E(0)
  double predicted_work = 0.0; // -F v dt
  double analytic_work = 0.0;  // dE/dt(0) dt
  double rel_measured_vs_predicted = 0.0;
  double rel_measured_vs_analytic = 0.0;
  double rel_predicted_vs_analytic = 0.0;
  std::size_t steps = 0;
  double norm_drift = 0.0;
};

struct ScalingStudy {
  double speed = 0.0;
  std::vector<double> displacements;
  std::vector<double> discrepancies;  // |measured - predicted|
  double fitted_order = 0.0;          // least-squares log-log slope
};

struct WallReport {
  WellGeometry geometry{Dimension::segment1D, 1.0, 0.0};
  PhysicalConstants constants;
  CoefficientList initial;
  Truncation truncation;
  double force = 0.0;
  double pressure = 0.0;
  double area = 0.0;
  double rate_per_speed = 0.0;  // dE/dt(0) / v, the same for every speed
  std::vector<WorkCell> cells;        // primary displacement, every speed, N then 2N
  std::vector<ScalingStudy> scaling;  // one per speed, base truncation
  /// Largest pairwise relative difference of the measured work across speeds (base N).
  double speed_spread = 0.0;
  /// Largest relative change of the measured work between N and 2N.
  double truncation_change = 0.0;

  const WorkCell& cell(double speed, int n_max) const;
};

/// Relative difference |a - b| / |reference|, 0 when both vanish.
double relative_difference(double a, double b, double reference);

/// Least-squares slope of log(y) against log(x).
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

/// Runs every (speed, displacement, truncation) cell, in parallel. Errors are
/// rethrown as ExperimentError naming the offending speed.
WallReport run_work_experiment(const WorkExperiment& experiment);

struct AdiabaticCheck {
  double force = 0.0;
  double energy_slope = 0.0;         // dE/dsize in closed form
  double energy_slope_numeric = 0.0; // centred difference of E over the size
  double relative_residual = 0.0;    // |F + dE/dsize| / F
};

AdiabaticCheck adiabatic_crosscheck(const WellGeometry& geometry, const ModeIndex& mode,
                                    const PhysicalConstants& constants = {});

struct NullityCheck {
  double rho2_wall_max = 0.0;
  double rho_d_wall_max = 0.0;
  double rho3_wall_force = 0.0;
  double measured_work = 0.0;
  double rho2_predicted_work = 0.0;  // the wall value of rho2 times the boundary measure times -dl
  double rho3_predicted_work = 0.0;
};

/// Evaluates rho2 and rho_D on the wall and compares the works they and rho3
/// would predict with the work measured over a displacement dl at the
/// geometry's speed (which must be nonzero).
NullityCheck rho2_wall_nullity_check(const SpectralState& state, double displacement,
                                     std::array<std::size_t, 2> boundary_counts = {64, 32});

}  // namespace qpiston
