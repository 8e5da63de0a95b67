#include "qpiston/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "density_internal.hpp"
#include "qpiston/errors.hpp"
#include "qpiston/specfun.hpp"

namespace qpiston {

namespace {

using cplx = std::complex<double>;

// Radial sums per sector and radial node: U = sum c R, U' = sum c R', G = sum c R/r,
// and the same with c -> c E for H Psi.
struct RadialTables {
  std::size_t nodes = 0;
  std::vector<cplx> u, du, g, hu, hdu, hg;  // [sector * nodes + i]

  RadialTables(std::size_t sectors, std::size_t n)
      : nodes(n), u(sectors * n), du(sectors * n), g(sectors * n), hu(sectors * n),
        hdu(sectors * n), hg(sectors * n) {}
  std::size_t at(std::size_t s, std::size_t i) const { return s * nodes + i; }
};

RadialTables radial_tables(const SpectralState& state, const GridAxis& radial) {
  const auto& modes = state.modes();
  const auto& g = state.geometry();
  const double t = state.time();
  const auto& sectors = modes.sectors();
  const auto c = state.phased_coefficients();
  RadialTables tab(sectors.size(), radial.size());
  const long ns = static_cast<long>(sectors.size());
  const long nr = static_cast<long>(radial.size());
#pragma omp parallel for collapse(2) schedule(static)
  for (long s = 0; s < ns; ++s) {
    for (long i = 0; i < nr; ++i) {
      const std::size_t k = tab.at(s, i);
      for (std::size_t a : sectors[s]) {
        if (c[a] == 0.0) continue;
        const auto rp = radial_profile(g, modes[a], radial.nodes[i], t);
        const cplx hc = c[a] * instantaneous_energy(state.constants(), g, modes[a], t);
        tab.u[k] += c[a] * rp.value;
        tab.du[k] += c[a] * rp.derivative;
        tab.g[k] += c[a] * rp.over_r;
        tab.hu[k] += hc * rp.value;
        tab.hdu[k] += hc * rp.derivative;
        tab.hg[k] += hc * rp.over_r;
      }
    }
  }
  return tab;
}

void sample_segment(const SpectralState& state, const SpatialGrid& grid, WaveSamples& out) {
  const auto tab = radial_tables(state, grid.axis(0));
  const long n = static_cast<long>(grid.point_count());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    out.psi[i] = tab.u[i];
    out.h_psi[i] = tab.hu[i];
    out.grad[0][i] = tab.du[i];
    out.h_grad[0][i] = tab.hdu[i];
  }
}

void sample_disk(const SpectralState& state, const SpatialGrid& grid, WaveSamples& out) {
  const auto& modes = state.modes();
  const auto& sectors = modes.sectors();
  const auto tab = radial_tables(state, grid.axis(0));
  const auto& phi = grid.axis(1);
  const std::size_t nphi = phi.size();
  // e^{i m phi_j} per sector
  std::vector<cplx> ang(sectors.size() * nphi);
  std::vector<double> m_of(sectors.size());
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    m_of[s] = modes[sectors[s].front()].index.m;
    for (std::size_t j = 0; j < nphi; ++j) ang[s * nphi + j] = std::polar(1.0, m_of[s] * phi.nodes[j]);
  }
  const long nr = static_cast<long>(grid.axis(0).size());
  const long np = static_cast<long>(nphi);
#pragma omp parallel for collapse(2) schedule(static)
  for (long i = 0; i < nr; ++i) {
    for (long j = 0; j < np; ++j) {
      cplx psi = 0.0, hpsi = 0.0, gr = 0.0, gp = 0.0, hgr = 0.0, hgp = 0.0;
      for (std::size_t s = 0; s < sectors.size(); ++s) {
        const std::size_t k = tab.at(s, i);
        const cplx e = ang[s * nphi + j];
        const cplx im = cplx(0.0, m_of[s]) * e;
        psi += tab.u[k] * e;
        hpsi += tab.hu[k] * e;
        gr += tab.du[k] * e;
        hgr += tab.hdu[k] * e;
        gp += tab.g[k] * im;
        hgp += tab.hg[k] * im;
      }
      const std::size_t p = grid.flat(i, j);
      out.psi[p] = psi;
      out.h_psi[p] = hpsi;
      out.grad[0][p] = gr;
      out.grad[1][p] = gp;
      out.h_grad[0][p] = hgr;
      out.h_grad[1][p] = hgp;
    }
  }
}

void sample_sphere(const SpectralState& state, const SpatialGrid& grid, WaveSamples& out) {
  const auto& modes = state.modes();
  const auto& sectors = modes.sectors();
  const auto tab = radial_tables(state, grid.axis(0));
  const auto& theta = grid.axis(1);
  const auto& phi = grid.axis(2);
  const std::size_t nth = theta.size(), nphi = phi.size(), ns = sectors.size();
  // Y_lm and its angular derivatives at phi = 0; the e^{i m phi} factor is applied per point.
  std::vector<specfun::HarmonicSample> ylm(ns * nth);
  std::vector<cplx> eim(ns * nphi);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& idx = modes[sectors[s].front()].index;
    for (std::size_t j = 0; j < nth; ++j) {
      ylm[s * nth + j] = specfun::spherical_harmonic_sample(idx.l, idx.m, theta.nodes[j], 0.0);
    }
    for (std::size_t q = 0; q < nphi; ++q) eim[s * nphi + q] = std::polar(1.0, idx.m * phi.nodes[q]);
  }
  const long nr = static_cast<long>(grid.axis(0).size());
  const long nt = static_cast<long>(nth);
  const long np = static_cast<long>(nphi);
#pragma omp parallel for collapse(3) schedule(static)
  for (long i = 0; i < nr; ++i) {
    for (long j = 0; j < nt; ++j) {
      for (long q = 0; q < np; ++q) {
        cplx psi = 0.0, hpsi = 0.0;
        cplx g0 = 0.0, g1 = 0.0, g2 = 0.0, h0 = 0.0, h1 = 0.0, h2 = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
          const std::size_t k = tab.at(s, i);
          const auto& y = ylm[s * nth + j];
          const cplx e = eim[s * nphi + q];
          const cplx yv = y.value * e, yt = y.d_theta * e, yp = y.d_phi_over_sin * e;
          psi += tab.u[k] * yv;
          hpsi += tab.hu[k] * yv;
          g0 += tab.du[k] * yv;
          h0 += tab.hdu[k] * yv;
          g1 += tab.g[k] * yt;
          h1 += tab.hg[k] * yt;
          g2 += tab.g[k] * yp;
          h2 += tab.hg[k] * yp;
        }
        const std::size_t p = grid.flat(i, j, q);
        out.psi[p] = psi;
        out.h_psi[p] = hpsi;
        out.grad[0][p] = g0;
        out.grad[1][p] = g1;
        out.grad[2][p] = g2;
        out.h_grad[0][p] = h0;
        out.h_grad[1][p] = h1;
        out.h_grad[2][p] = h2;
      }
    }
  }
}

std::size_t components_of(FieldKind kind, Dimension d) {
  switch (kind) {
    case FieldKind::rho1:
      return 2;
    case FieldKind::flux_d:
    case FieldKind::flux2:
    case FieldKind::flux3:
      return static_cast<std::size_t>(rank(d));
    default:
      return 1;
  }
}

}  // namespace

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::rho_d: return "rho_d";
    case FieldKind::flux_d: return "flux_d";
    case FieldKind::rho1: return "rho1";
    case FieldKind::rho2: return "rho2";
    case FieldKind::rho3: return "rho3";
    case FieldKind::flux2: return "flux2";
    case FieldKind::flux3: return "flux3";
  }
  return "unknown";
}

WaveSamples::WaveSamples(std::size_t points) : psi(points), h_psi(points) {
  for (auto& v : grad) v.resize(points);
  for (auto& v : h_grad) v.resize(points);
}

namespace detail {

void require_grid_matches(const SpectralState& state, const SpatialGrid& grid) {
  const auto& g = state.geometry();
  if (grid.dimension() != g.dimension()) throw DomainError("grid and state dimensions differ");
  const double s = g.size(state.time());
  if (std::abs(grid.size() - s) > 1e-12 * s) {
    throw DomainError("grid was built for size " + std::to_string(grid.size()) +
                      " but the well has size " + std::to_string(s));
  }
}

WaveSamples sample_wave_tabulated(const SpectralState& state, const SpatialGrid& grid) {
  require_grid_matches(state, grid);
  WaveSamples out(grid.point_count());
  switch (grid.dimension()) {
    case Dimension::segment1D: sample_segment(state, grid, out); break;
    case Dimension::disk2D: sample_disk(state, grid, out); break;
    case Dimension::sphere3D: sample_sphere(state, grid, out); break;
  }
  return out;
}

}  // namespace detail

WaveSamples sample_wave(const SpectralState& state, const SpatialGrid& grid, Backend backend) {
  return backend == Backend::parallel ? detail::sample_wave_tabulated(state, grid)
                                      : detail::sample_wave_reference(state, grid);
}

DensityField::DensityField(FieldKind kind, std::shared_ptr<const SpatialGrid> grid,
                           std::size_t components)
    : kind_(kind), grid_(std::move(grid)), components_(components),
      values_(grid_->point_count() * components, 0.0) {}

double DensityField::integrate(std::size_t component) const {
  double total = 0.0;
  for (std::size_t i = 0; i < grid_->point_count(); ++i) total += grid_->weight(i) * at(i, component);
  return total;
}

double DensityField::max_abs(std::size_t component) const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid_->point_count(); ++i) m = std::max(m, std::abs(at(i, component)));
  return m;
}

DensityField make_field(FieldKind kind, const SpectralState& state,
                        std::shared_ptr<const SpatialGrid> grid, const WaveSamples& w) {
  const std::size_t dims = static_cast<std::size_t>(rank(grid->dimension()));
  DensityField f(kind, grid, components_of(kind, grid->dimension()));
  const double hbar = state.constants().hbar, mu = state.constants().mu;
  const long n = static_cast<long>(grid->point_count());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const cplx psi = w.psi[i], hpsi = w.h_psi[i];
    switch (kind) {
      case FieldKind::rho_d:
        f.at(i) = std::norm(psi);
        break;
      case FieldKind::flux_d:
        for (std::size_t k = 0; k < dims; ++k) f.at(i, k) = hbar / mu * std::imag(std::conj(psi) * w.grad[k][i]);
        break;
      case FieldKind::rho1: {
        const cplx r = std::conj(psi) * hpsi;
        f.at(i, 0) = r.real();
        f.at(i, 1) = r.imag();
        break;
      }
      case FieldKind::rho2:
        f.at(i) = std::real(std::conj(psi) * hpsi);
        break;
      case FieldKind::rho3: {
        double s = 0.0;
        for (std::size_t k = 0; k < dims; ++k) s += std::norm(w.grad[k][i]);
        f.at(i) = hbar * hbar / (2.0 * mu) * s;
        break;
      }
      case FieldKind::flux2:
        for (std::size_t k = 0; k < dims; ++k) {
          f.at(i, k) = hbar / (2.0 * mu) *
                       std::imag(std::conj(psi) * w.h_grad[k][i] - hpsi * std::conj(w.grad[k][i]));
        }
        break;
      case FieldKind::flux3:
        for (std::size_t k = 0; k < dims; ++k) f.at(i, k) = hbar / mu * std::imag(std::conj(hpsi) * w.grad[k][i]);
        break;
    }
  }
  return f;
}

namespace {

DensityField single(FieldKind kind, const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  const auto samples = sample_wave(state, *grid);
  return make_field(kind, state, std::move(grid), samples);
}

}  // namespace

DensityField rho_d(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  return single(FieldKind::rho_d, state, std::move(grid));
}
DensityField flux_d(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  return single(FieldKind::flux_d, state, std::move(grid));
}
DensityField rho1(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  return single(FieldKind::rho1, state, std::move(grid));
}
DensityField rho2(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  return single(FieldKind::rho2, state, std::move(grid));
}
DensityField rho3(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid) {
  return single(FieldKind::rho3, state, std::move(grid));
}

DensityField energy_flux(const SpectralState& state, std::shared_ptr<const SpatialGrid> grid,
                         FieldKind which) {
  if (which != FieldKind::flux2 && which != FieldKind::flux3) {
    throw DomainError("energy_flux takes flux2 or flux3");
  }
  return single(which, state, std::move(grid));
}

std::vector<DensityField> all_fields(const SpectralState& state,
                                     std::shared_ptr<const SpatialGrid> grid) {
  const auto samples = sample_wave(state, *grid);
  std::vector<DensityField> out;
  for (FieldKind k : {FieldKind::rho_d, FieldKind::flux_d, FieldKind::rho1, FieldKind::rho2,
                      FieldKind::rho3, FieldKind::flux2, FieldKind::flux3}) {
    out.push_back(make_field(k, state, grid, samples));
  }
  return out;
}

WallValue rho3_at_wall(const SpectralState& state) {
  const auto& g = state.geometry();
  if (g.dimension() != Dimension::segment1D) {
    throw DomainError("a single wall value exists only for the segment");
  }
  const double t = state.time();
  const double l = g.size(t);
  const auto c = state.phased_coefficients();
  // phi_n'(L) = sqrt(2/L) (n pi / L) cos(n pi)
  cplx slope = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a) {
    const auto& m = state.modes()[a];
    slope += c[a] * boundary_sign(g.dimension(), m.index) * std::sqrt(2.0 / l) * m.z / l;
  }
  const auto& k = state.constants();
  return {k.hbar * k.hbar / (2.0 * k.mu) * std::norm(slope), t};
}

namespace {

void require_boundary(const SpatialGrid& grid) {
  if (!grid.on_boundary()) throw DomainError("wall fields need a boundary grid");
}

}  // namespace

DensityField rho3_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary) {
  require_boundary(*boundary);
  return rho3(state, std::move(boundary));
}

DensityField rho_d_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary) {
  require_boundary(*boundary);
  return rho_d(state, std::move(boundary));
}

DensityField rho2_on_boundary(const SpectralState& state, std::shared_ptr<const SpatialGrid> boundary) {
  require_boundary(*boundary);
  return rho2(state, std::move(boundary));
}

double wall_force(const SpectralState& state) {
  const auto& g = state.geometry();
  const auto& modes = state.modes();
  const auto c = state.phased_coefficients();
  double total = 0.0;
  for (const auto& sector : modes.sectors()) {
    cplx s = 0.0;
    for (std::size_t a : sector) s += boundary_sign(g.dimension(), modes[a].index) * modes[a].z * c[a];
    total += std::norm(s);
  }
  const double size = g.size(state.time());
  const auto& k = state.constants();
  return k.hbar * k.hbar / (k.mu * size * size * size) * total;
}

double wall_pressure(const SpectralState& state) {
  return wall_force(state) / state.geometry().boundary_area(state.time());
}

}  // namespace qpiston
