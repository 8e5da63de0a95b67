#pragma once

// Coefficient dynamics in the instantaneous eigenbasis. The wavefunction is
// Psi = sum_a b_a(t) exp(-i theta_a(t)) phi_a(t), with theta in closed form,
// so only the slow coefficients b are integrated.

#include <complex>
#include <cstddef>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "qpiston/basis.hpp"
#include "qpiston/integrator.hpp"

namespace qpiston {

class SpectralState {
 public:
  SpectralState(std::shared_ptr<const ModeSet> modes, ComplexVector coefficients, double time,
                PhysicalConstants constants = {});

  /// b_mode = 1, every other coefficient 0.
  static SpectralState eigenstate(std::shared_ptr<const ModeSet> modes, const ModeIndex& mode,
                                  PhysicalConstants constants = {}, double time = 0.0);

  /// Coefficients given per mode; unlisted modes are 0. Throws DomainError when
  /// the norm is off by more than 1e-8 or a mode is missing from the set.
  static SpectralState from_coefficients(
      std::shared_ptr<const ModeSet> modes,
      const std::vector<std::pair<ModeIndex, std::complex<double>>>& coefficients,
      PhysicalConstants constants = {}, double time = 0.0);

  const ModeSet& modes() const noexcept { return *modes_; }
  const std::shared_ptr<const ModeSet>& mode_set() const noexcept { return modes_; }
  const WellGeometry& geometry() const noexcept { return modes_->geometry(); }
  const ComplexVector& coefficients() const noexcept { return b_; }
  double time() const noexcept { return time_; }
  const PhysicalConstants& constants() const noexcept { return constants_; }

  std::complex<double> coefficient(const ModeIndex& mode) const;
  double norm() const;

  /// c_a = b_a exp(-i theta_a(t)): the amplitudes multiplying phi_a in Psi.
  ComplexVector phased_coefficients() const;

  /// Same coefficients and time over a copy of the mode set with another geometry.
  SpectralState with_geometry(const WellGeometry& geometry) const;

 private:
  std::shared_ptr<const ModeSet> modes_;
  ComplexVector b_;
  double time_;
  PhysicalConstants constants_;
};

struct EvolveOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Extra times (inside the window) at which states are recorded.
  std::vector<double> output_times;
  /// Replays the accepted step sequence with every step halved and reports
  /// the final-state difference.
  bool richardson_check = true;
  /// Accepted plus rejected steps before StepSizeUnderflow is raised.
  std::size_t max_steps = 100'000'000;
};

struct TrajectoryDiagnostics {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  double max_norm_drift = 0.0;
  double richardson_error = 0.0;
};

struct Trajectory {
  std::vector<SpectralState> states;  // first is the initial state, last the final one
  TrajectoryDiagnostics diagnostics;

  const SpectralState& final_state() const { return states.back(); }
};

/// Right-hand side of the coefficient equations for one mode set.
class CoefficientSystem {
 public:
  CoefficientSystem(const ModeSet& modes, const PhysicalConstants& constants);

  void operator()(double t, const ComplexVector& b, ComplexVector& dbdt) const;

 private:
  WellGeometry geometry_;
  std::vector<std::vector<std::size_t>> sectors_;
  std::vector<std::vector<double>> kappa_;  // per-sector size-free couplings, row-major
  std::vector<double> phase_rate_;          // hbar z^2 / 2 mu
  mutable std::vector<std::complex<double>> phase_, work_;
};

/// Integrates from initial.time() to t_final >= initial.time(). Throws
/// SingularMotionError if the wall collapses in the window and
/// StepSizeUnderflow if the stepper stalls.
Trajectory evolve(const SpectralState& initial, double t_final, const EvolveOptions& options = {});

/// Integrates the same equations backwards in time to t_target <= state.time().
SpectralState rewind(const SpectralState& state, double t_target,
                     const EvolveOptions& options = {});

/// count distinct modes drawn uniformly from the set, with complex Gaussian
/// amplitudes, normalized.
SpectralState random_state(std::shared_ptr<const ModeSet> modes, std::size_t count,
                           std::mt19937_64& rng, PhysicalConstants constants = {});

/// sum |b|^2 E_a(t).
double expected_energy(const SpectralState& state);

/// dE/dt at the state's time: -(hbar^2 v / mu S^3) sum_sectors |sum_n s_n z_n c_n|^2.
double energy_rate(const SpectralState& state);

/// energy_rate for a state at t = 0; throws DomainError otherwise.
double energy_rate_initial(const SpectralState& state);

/// dE/dt assembled term by term from the mode energies and the coefficient
/// equations, without the closed-form collapse of the double sum.
double energy_rate_from_couplings(const SpectralState& state);

}  // namespace qpiston
