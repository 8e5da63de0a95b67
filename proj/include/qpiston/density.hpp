#pragma once

// Probability and energy densities of a spectral state, with their fluxes,
// sampled on product grids; plus closed-form wall values and forces.
//
// With Phi = H Psi = sum_a c_a E_a phi_a (instantaneous Hamiltonian):
//   rho_D = |Psi|^2                      J_D = (hbar/mu) Im(Psi* grad Psi)
//   rho1  = Psi* Phi                     rho2 = Re rho1
//   rho3  = (hbar^2 / 2 mu) |grad Psi|^2
//   J2    = (hbar / 2 mu) Im(Psi* grad Phi - Phi grad Psi*)
//   J3    = (hbar / mu) Im(Phi* grad Psi)
// Vectors are stored in the local orthonormal frame of the grid coordinates.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "qpiston/dynamics.hpp"
#include "qpiston/grid.hpp"

namespace qpiston {

enum class FieldKind { rho_d, flux_d, rho1, rho2, rho3, flux2, flux3 };

std::string to_string(FieldKind kind);

/// Per-point values of Psi, Phi = H Psi and their gradients.
struct WaveSamples {
  std::vector<std::complex<double>> psi, h_psi;
  std::array<std::vector<std::complex<double>>, 3> grad, h_grad;

  explicit WaveSamples(std::size_t points = 0);
  std::size_t size() const noexcept { return psi.size(); }
};

enum class Backend { parallel, serial_reference };

/// Evaluates Psi and friends on every grid point. The parallel backend builds
/// radial and angular tables once and sums sectors per point with OpenMP; the
/// serial reference evaluates each mode at each point directly.
WaveSamples sample_wave(const SpectralState& state, const SpatialGrid& grid,
                        Backend backend = Backend::parallel);

/// Single-point evaluation through the reference path.
struct PointSample {
  std::complex<double> psi, h_psi;
  std::array<std::complex<double>, 3> grad{}, h_grad{};
};
PointSample sample_wave_at(const SpectralState& state, const Point& point);

class DensityField {
 public:
  DensityField(FieldKind kind, std::shared_ptr<const SpatialGrid> grid, std::size_t components);

  FieldKind kind() const noexcept { return kind_; }
  const SpatialGrid& grid() const noexcept { return *grid_; }
  /// 1 for real scalars, 2 for rho1 (re, im), the rank for vector fields.
  std::size_t components() const noexcept { return components_; }

  double& at(std::size_t point, std::size_t component = 0) {
    return values_[point * components_ + component];
  }
  double at(std::size_t point, std::size_t component = 0) const {
    return values_[point * components_ + component];
  }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Weighted grid sum of one component.
  double integrate(std::size_t component = 0) const;
  double max_abs(std::size_t component = 0) const;

 private:
  FieldKind kind_;
  std::shared_ptr<const SpatialGrid> grid_;
  std::size_t components_;
  std::vector<double> values_;
};

/// Builds a field of the given kind from samples taken on the grid.
DensityField make_field(FieldKind kind, const SpectralState& state,
                        std::shared_ptr<const SpatialGrid> grid, const WaveSamples& samples);

DensityField rho_d(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid);
DensityField flux_d(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid);
DensityField rho1(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid);
DensityField rho2(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid);
DensityField rho3(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid);
/// which must be FieldKind::flux2 or FieldKind::flux3.
DensityField energy_flux(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid,
                         FieldKind which);

/// Every field kind from one sampling pass, in FieldKind order.
std::vector<DensityField> all_fields(const SpectralState& state,
                                     std::shared_ptr<const SpatialGrid> grid);

struct WallValue {
  double value = 0.0;
  double time = 0.0;
};

/// 1D: the wall limit of rho3, (hbar^2 pi^2 / mu L^3) |sum_n c_n (-1)^n n|^2.
/// Throws DomainError in 2D and 3D, where the wall value depends on angle.
WallValue rho3_at_wall(const SpectralState& state);

/// rho3 on a boundary grid built from the basis derivatives at r = R.
DensityField rho3_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary);

/// Wall limits of rho_D and rho2 on a boundary grid.
DensityField rho_d_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary);
DensityField rho2_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary);

/// Mean force on the wall: (hbar^2 / mu S^3) sum_sectors |sum_n s_n z_n c_n|^2,
/// the boundary integral of rho3 in closed form.
double wall_force(const SpectralState& state);
/// Force over the boundary measure (1 for the segment, 2 pi R, 4 pi R^2).
double wall_pressure(const SpectralState& state);

}  // namespace qpiston

namespace qpiston {

/// Discrete check of d(rho)/dt + div J = 0 for one density / flux pair.
struct ContinuityResidual {
  double max_residual = 0.0;  // grid max-norm over the interior subgrid
  double max_rate = 0.0;      // max |d rho / dt| there, for scale
  std::size_t interior_points = 0;
};

/// density must be rho_d, rho2 or rho3 (paired with flux_d, flux2, flux3).
/// The time derivative is a centred difference of snapshots at t -+ dt taken
/// from evolve/rewind; the divergence uses three-point differences along each
/// grid axis (one-sided at the ends, wrapped on a periodic phi axis). The grid
/// must describe the well at the state's time and its nodes must stay inside
/// the well at t -+ dt. Interior means every non-periodic index off the ends.
ContinuityResidual continuity_residual(const SpectralState& state, FieldKind density,
                                       const SpatialGrid& grid, double dt);

}  // namespace qpiston
