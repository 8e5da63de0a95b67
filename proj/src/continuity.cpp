#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpiston/density.hpp"
#include "qpiston/errors.hpp"

namespace qpiston {

namespace {

// Slope at `at` of the parabola through (x0,f0), (x1,f1), (x2,f2).
double parabola_slope(double x0, double x1, double x2, double f0, double f1, double f2, double at) {
  const double d0 = (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double d1 = (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double d2 = (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
  return f0 * d0 + f1 * d1 + f2 * d2;
}

bool is_periodic_phi(const SpatialGrid& grid, std::size_t k) {
  if (grid.dimension() == Dimension::segment1D || k + 1 != grid.axes().size()) return false;
  const auto& x = grid.axis(k).nodes;
  if (x.size() < 3) return false;
  const double h = x[1] - x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs(x[i] - x[i - 1] - h) > 1e-12) return false;
  }
  return std::abs(h * x.size() - 2.0 * std::numbers::pi) < 1e-10;
}

// Derivative of f along axis k at every grid point.
std::vector<double> axis_derivative(const SpatialGrid& grid, std::size_t k, const std::vector<double>& f) {
  const auto& x = grid.axis(k).nodes;
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("continuity grids need at least three nodes per axis");
  const bool periodic = is_periodic_phi(grid, k);
  const double period = 2.0 * std::numbers::pi;
  std::vector<double> out(f.size());
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    auto idx = grid.unflat(p);
    const std::size_t i = idx[k];
    auto value = [&](std::size_t j) {
      auto q = idx;
      q[k] = j;
      return f[grid.flat(q[0], q[1], q[2])];
    };
    if (periodic) {
      const std::size_t lo = (i + n - 1) % n, hi = (i + 1) % n;
      const double xl = i == 0 ? x[lo] - period : x[lo];
      const double xh = i + 1 == n ? x[hi] + period : x[hi];
      out[p] = parabola_slope(xl, x[i], xh, value(lo), value(i), value(hi), x[i]);
    } else {
      const std::size_t a = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
      out[p] = parabola_slope(x[a], x[a + 1], x[a + 2], value(a), value(a + 1), value(a + 2), x[i]);
    }
  }
  return out;
}

FieldKind flux_for(FieldKind density) {
  switch (density) {
    case FieldKind::rho_d: return FieldKind::flux_d;
    case FieldKind::rho2: return FieldKind::flux2;
    case FieldKind::rho3: return FieldKind::flux3;
    default: throw DomainError("continuity residuals are defined for rho_d, rho2 and rho3");
  }
}

std::vector<double> density_at(const SpectralState& state, FieldKind kind, const SpatialGrid& nodes) {
  auto grid = std::make_shared<const SpatialGrid>(
      SpatialGrid::from_axes(nodes.dimension(), state.geometry().size(state.time()), nodes.axes()));
  return make_field(kind, state, grid, sample_wave(state, *grid)).values();
}

}  // namespace

ContinuityResidual continuity_residual(const SpectralState& state, FieldKind density,
                                       const SpatialGrid& grid, double dt) {
  const FieldKind flux_kind = flux_for(density);
  if (!(dt > 0.0)) throw DomainError("continuity time step must be positive");
  if (grid.on_boundary()) throw DomainError("continuity residuals need an interior grid");
  const double t = state.time();

  EvolveOptions opts;
  opts.richardson_check = false;
  opts.rtol = 1e-13;
  opts.atol = 1e-15;
  const auto later = evolve(state, t + dt, opts).final_state();
  const auto earlier = rewind(state, t - dt, opts);
  const auto up = density_at(later, density, grid);
  const auto down = density_at(earlier, density, grid);

  auto here = std::make_shared<const SpatialGrid>(
      SpatialGrid::from_axes(grid.dimension(), state.geometry().size(t), grid.axes()));
  const DensityField flux = make_field(flux_kind, state, here, sample_wave(state, *here));

  const std::size_t np = grid.point_count();
  const std::size_t dims = grid.axes().size();
  std::vector<double> div(np, 0.0), comp(np);
  for (std::size_t k = 0; k < dims; ++k) {
    // radial: (1/r^(d-1)) d(r^(d-1) J_r)/dr; polar: (1/(r sin)) d(sin J_theta)/dtheta;
    // azimuthal: (1/(r sin)) dJ_phi/dphi (sin = 1 on the disk).
    for (std::size_t p = 0; p < np; ++p) {
      const Point x = grid.point(p);
      double factor = 1.0;
      if (k == 0 && dims > 1) factor = std::pow(x[0], static_cast<double>(dims - 1));
      if (k == 1 && dims == 3) factor = std::sin(x[1]);
      comp[p] = factor * flux.at(p, k);
    }
    const auto d = axis_derivative(grid, k, comp);
    for (std::size_t p = 0; p < np; ++p) {
      const Point x = grid.point(p);
      double scale = 1.0;
      if (dims > 1) {
        if (k == 0) scale = 1.0 / std::pow(x[0], static_cast<double>(dims - 1));
        else if (dims == 2) scale = 1.0 / x[0];
        else scale = 1.0 / (x[0] * std::sin(x[1]));
      }
      div[p] += scale * d[p];
    }
  }

  ContinuityResidual out;
  for (std::size_t p = 0; p < np; ++p) {
    const auto idx = grid.unflat(p);
    bool interior = true;
    for (std::size_t k = 0; k < dims; ++k) {
      if (is_periodic_phi(grid, k)) continue;
      if (idx[k] == 0 || idx[k] + 1 == grid.axis(k).size()) interior = false;
    }
    if (!interior) continue;
    const double rate = (up[p] - down[p]) / (2.0 * dt);
    out.max_residual = std::max(out.max_residual, std::abs(rate + div[p]));
    out.max_rate = std::max(out.max_rate, std::abs(rate));
    ++out.interior_points;
  }
  return out;
}

}  // namespace qpiston
