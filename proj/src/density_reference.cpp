// Straightforward per-point evaluation: every mode at every point through the
// basis module. Kept serial; the tabulated kernel is checked against it.

#include "density_internal.hpp"

namespace qpiston {

PointSample sample_wave_at(const SpectralState& state, const Point& point) {
  const auto& g = state.geometry();
  const auto& modes = state.modes();
  const double t = state.time();
  const auto c = state.phased_coefficients();
  PointSample out;
  for (std::size_t a = 0; a < modes.size(); ++a) {
    if (c[a] == 0.0) continue;
    const auto phi = eigenfunction_sample(g, modes[a], point, t);
    const std::complex<double> hc = c[a] * instantaneous_energy(state.constants(), g, modes[a], t);
    out.psi += c[a] * phi.value;
    out.h_psi += hc * phi.value;
    for (int k = 0; k < 3; ++k) {
      out.grad[k] += c[a] * phi.gradient[k];
      out.h_grad[k] += hc * phi.gradient[k];
    }
  }
  return out;
}

namespace detail {

WaveSamples sample_wave_reference(const SpectralState& state, const SpatialGrid& grid) {
  require_grid_matches(state, grid);
  WaveSamples out(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    const auto p = sample_wave_at(state, grid.point(i));
    out.psi[i] = p.psi;
    out.h_psi[i] = p.h_psi;
    for (int k = 0; k < 3; ++k) {
      out.grad[k][i] = p.grad[k];
      out.h_grad[k][i] = p.h_grad[k];
    }
  }
  return out;
}

}  // namespace detail

}  // namespace qpiston
