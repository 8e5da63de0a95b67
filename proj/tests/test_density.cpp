#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "qpiston/density.hpp"
#include "qpiston/errors.hpp"

using namespace qpiston;
using oracle::pi;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const ModeSet> modes_for(Dimension d, double size, double v, Truncation tr) {
  return std::make_shared<const ModeSet>(WellGeometry(d, size, v), tr);
}

std::shared_ptr<const SpatialGrid> grid_for(Dimension d, double size, std::array<std::size_t, 3> n) {
  return std::make_shared<const SpatialGrid>(SpatialGrid::quadrature(d, size, n));
}

std::shared_ptr<const SpatialGrid> wall_for(Dimension d, double size, std::array<std::size_t, 2> n = {64, 32}) {
  return std::make_shared<const SpatialGrid>(SpatialGrid::boundary(d, size, n));
}

double z01() { return oracle::bisect([](double x) { return oracle::series_bessel_j(0, x, 60); }, 2.0, 3.0); }
double z02() { return oracle::bisect([](double x) { return oracle::series_bessel_j(0, x, 80); }, 5.0, 6.0); }

}  // namespace

TEST(Backends, TabulatedKernelMatchesReference) {
  std::mt19937_64 rng(21);
  const std::array<std::size_t, 3> counts[] = {{97, 1, 1}, {13, 11, 1}, {7, 6, 5}};
  for (Dimension d : {Dimension::segment1D, Dimension::disk2D, Dimension::sphere3D}) {
    auto modes = modes_for(d, 1.2, 0.3, Truncation{10, 2, 2});
    const auto s0 = random_state(modes, 8, rng);
    const SpectralState s(s0.mode_set(), s0.coefficients(), 0.4);
    const SpatialGrid g = SpatialGrid::quadrature(d, modes->geometry().size(0.4), counts[rank(d) - 1]);
    const auto a = sample_wave(s, g, Backend::parallel);
    const auto b = sample_wave(s, g, Backend::serial_reference);
    double scale = 0.0;
    for (std::size_t i = 0; i < g.point_count(); ++i) scale = std::max(scale, std::abs(b.h_grad[0][i]));
    for (std::size_t i = 0; i < g.point_count(); ++i) {
      EXPECT_NEAR(std::abs(a.psi[i] - b.psi[i]), 0.0, 1e-12 * scale);
      EXPECT_NEAR(std::abs(a.h_psi[i] - b.h_psi[i]), 0.0, 1e-12 * scale);
      for (int k = 0; k < rank(d); ++k) {
        EXPECT_NEAR(std::abs(a.grad[k][i] - b.grad[k][i]), 0.0, 1e-12 * scale);
        EXPECT_NEAR(std::abs(a.h_grad[k][i] - b.h_grad[k][i]), 0.0, 1e-12 * scale);
      }
    }
  }
}

TEST(Backends, GridMustMatchState) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.5, Truncation{4, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  EXPECT_THROW(sample_wave(s, SpatialGrid::quadrature(Dimension::segment1D, 1.5, {8, 1, 1})), DomainError);
  EXPECT_THROW(sample_wave(s, SpatialGrid::quadrature(Dimension::disk2D, 1.0, {8, 4, 1})), DomainError);
}

TEST(RhoD, GroundStateNormalizedWithoutCurrent) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{4, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  auto grid = grid_for(Dimension::segment1D, 1.0, {2048, 1, 1});
  EXPECT_NEAR(rho_d(s, grid).integrate(), 1.0, 1e-8);
  EXPECT_EQ(flux_d(s, grid).max_abs(), 0.0);
}

TEST(RhoD, SuperpositionMidpoint) {
  const double L = 2.0;
  auto modes = modes_for(Dimension::segment1D, L, 0.0, Truncation{4, 0, 0});
  const double h = std::sqrt(0.5);
  const auto s = SpectralState::from_coefficients(modes, {{ModeIndex::segment(1), h}, {ModeIndex::segment(2), h}});
  EXPECT_NEAR(std::norm(sample_wave_at(s, {L / 2, 0, 0}).psi), 1.0 / L, 1e-15);
}

TEST(Rho1, EigenstateIsEnergyTimesProbability) {
  auto modes = modes_for(Dimension::disk2D, 1.0, 0.0, Truncation{3, 1, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::disk(1, 2));
  auto grid = grid_for(Dimension::disk2D, 1.0, {24, 16, 1});
  const auto r1 = rho1(s, grid);
  const auto rd = rho_d(s, grid);
  const double e = expected_energy(s);
  for (std::size_t i = 0; i < grid->point_count(); ++i) {
    EXPECT_NEAR(r1.at(i, 0), e * rd.at(i), 1e-12 * e);
    EXPECT_NEAR(r1.at(i, 1), 0.0, 1e-12 * e);
  }
}

TEST(Rho1, ImaginaryPartIntegratesToZero) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{4, 0, 0});
  const auto s = SpectralState::from_coefficients(
      modes, {{ModeIndex::segment(1), std::sqrt(0.5)}, {ModeIndex::segment(2), std::polar(std::sqrt(0.5), 1.1)}});
  auto grid = grid_for(Dimension::segment1D, 1.0, {2048, 1, 1});
  const auto r1 = rho1(s, grid);
  EXPECT_GT(r1.max_abs(1), 1.0);
  EXPECT_NEAR(r1.integrate(1), 0.0, 1e-8);
}

TEST(Rho1, RealPartIntegratesToExpectedEnergy) {
  std::mt19937_64 rng(2);
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{12, 0, 0});
  const auto s = random_state(modes, 5, rng);
  auto grid = grid_for(Dimension::segment1D, 1.0, {2048, 1, 1});
  EXPECT_NEAR(rho1(s, grid).integrate(0), expected_energy(s), 1e-8);
}

TEST(Rho2, MatchesFiniteDifferenceLaplacian) {
  const double L = 1.0;
  auto modes = modes_for(Dimension::segment1D, L, 0.0, Truncation{4, 0, 0});
  const cplx c1 = std::sqrt(0.5), c2 = std::polar(std::sqrt(0.5), 0.6);
  const auto s = SpectralState::from_coefficients(modes, {{ModeIndex::segment(1), c1}, {ModeIndex::segment(2), c2}});
  auto psi = [&](double x) { return c1 * oracle::segment_mode(1, x, L) + c2 * oracle::segment_mode(2, x, L); };
  const double x = L / 4, h = 1e-3;
  const cplx lap = (-psi(x + 2 * h) + 16.0 * psi(x + h) - 30.0 * psi(x) + 16.0 * psi(x - h) - psi(x - 2 * h)) /
                   (12 * h * h);
  const double want = std::real(std::conj(psi(x)) * (-0.5 * lap));
  auto grid = std::make_shared<const SpatialGrid>(SpatialGrid::from_axes(Dimension::segment1D, L, {GridAxis{{x}, {}}}));
  EXPECT_NEAR(rho2(s, grid).at(0), want, 1e-6);
}

TEST(Rho2, EqualsRealPartOfRho1) {
  std::mt19937_64 rng(4);
  auto modes = modes_for(Dimension::sphere3D, 1.0, 0.0, Truncation{3, 0, 2});
  const auto s = random_state(modes, 6, rng);
  auto grid = grid_for(Dimension::sphere3D, 1.0, {10, 8, 8});
  const auto r1 = rho1(s, grid);
  const auto r2 = rho2(s, grid);
  for (std::size_t i = 0; i < grid->point_count(); ++i) EXPECT_EQ(r2.at(i), r1.at(i, 0));
}

TEST(Rho3, GroundStateMidpointAndIntegral) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{4, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  EXPECT_LT(std::norm(sample_wave_at(s, {0.5, 0, 0}).grad[0]), 1e-28);
  EXPECT_NEAR(rho3(s, grid_for(Dimension::segment1D, 1.0, {2048, 1, 1})).integrate(), pi * pi / 2, 1e-8);
}

TEST(Rho3, SphereMatchesFiniteDifferenceGradient) {
  auto modes = modes_for(Dimension::sphere3D, 1.0, 0.0, Truncation{2, 0, 1});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::sphere(1, 1, 0));
  // independent psi: sqrt(2) j_1(z r) Y_10(theta) / j_2(z)
  const double z = oracle::bisect([](double x) { return std::sph_bessel(1, x); }, 4.0, 5.0);
  auto psi = [&](double x, double y, double w) {
    const double r = std::sqrt(x * x + y * y + w * w);
    return std::sqrt(2.0) * std::sph_bessel(1, z * r) * std::sph_legendre(1, 0, std::acos(w / r)) /
           std::sph_bessel(2, z);
  };
  const double r = 0.45, th = 1.0, ph = 0.7;
  const double x = r * std::sin(th) * std::cos(ph), y = r * std::sin(th) * std::sin(ph), w = r * std::cos(th);
  const double h = 1e-5;
  const double gx = (psi(x + h, y, w) - psi(x - h, y, w)) / (2 * h);
  const double gy = (psi(x, y + h, w) - psi(x, y - h, w)) / (2 * h);
  const double gz = (psi(x, y, w + h) - psi(x, y, w - h)) / (2 * h);
  const double want = 0.5 * (gx * gx + gy * gy + gz * gz);
  auto grid = std::make_shared<const SpatialGrid>(
      SpatialGrid::from_axes(Dimension::sphere3D, 1.0, {GridAxis{{r}, {}}, GridAxis{{th}, {}}, GridAxis{{ph}, {}}}));
  EXPECT_NEAR(rho3(s, grid).at(0), want, 1e-6);
}

TEST(Rho3, NonNegativeEverywhere) {
  std::mt19937_64 rng(8);
  auto modes = modes_for(Dimension::disk2D, 1.0, 0.0, Truncation{5, 3, 0});
  const auto s = random_state(modes, 8, rng);
  const auto f = rho3(s, grid_for(Dimension::disk2D, 1.0, {32, 32, 1}));
  for (double v : f.values()) EXPECT_GE(v, 0.0);
}

TEST(Fluxes, VanishForStationaryStates) {
  // real radial profiles: m = 0 modes
  const ModeIndex picks[] = {ModeIndex::segment(2), ModeIndex::disk(0, 2), ModeIndex::sphere(2, 1, 0)};
  for (Dimension d : {Dimension::segment1D, Dimension::disk2D, Dimension::sphere3D}) {
    auto modes = modes_for(d, 1.0, 0.0, Truncation{2, 0, 1});
    const auto e = SpectralState::eigenstate(modes, picks[rank(d) - 1]);
    auto grid = grid_for(d, 1.0, {12, 8, 6});
    for (FieldKind k : {FieldKind::flux2, FieldKind::flux3}) {
      const auto f = energy_flux(e, grid, k);
      for (int c = 0; c < rank(d); ++c) EXPECT_LT(f.max_abs(c), 1e-12) << to_string(d);
    }
    EXPECT_LT(flux_d(e, grid).max_abs(0), 1e-14);
  }
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{2, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  EXPECT_THROW(energy_flux(s, grid_for(Dimension::segment1D, 1.0, {4, 1, 1}), FieldKind::rho2), DomainError);
}

TEST(Fluxes, AzimuthalCurrentOfRotatingMode) {
  // e^{i m phi} carries J_phi = (hbar / mu) m |psi|^2 / r, and flux3 = E J_D for an eigenstate.
  auto modes = modes_for(Dimension::disk2D, 1.0, 0.0, Truncation{1, 2, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::disk(2, 1));
  auto grid = grid_for(Dimension::disk2D, 1.0, {6, 5, 1});
  const auto j = flux_d(s, grid);
  const auto j3 = energy_flux(s, grid, FieldKind::flux3);
  const auto rd = rho_d(s, grid);
  const double e = expected_energy(s);
  for (std::size_t i = 0; i < grid->point_count(); ++i) {
    const double r = grid->point(i)[0];
    EXPECT_NEAR(j.at(i, 1), 2.0 * rd.at(i) / r, 1e-12);
    EXPECT_NEAR(j.at(i, 0), 0.0, 1e-12);
    EXPECT_NEAR(j3.at(i, 1), e * j.at(i, 1), 1e-10);
  }
}

TEST(AllFields, OrderAndComponents) {
  auto modes = modes_for(Dimension::sphere3D, 1.0, 0.0, Truncation{1, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::sphere(1, 0, 0));
  const auto f = all_fields(s, grid_for(Dimension::sphere3D, 1.0, {4, 4, 4}));
  ASSERT_EQ(f.size(), 7u);
  const std::size_t comps[] = {1, 3, 2, 1, 1, 3, 3};
  for (int k = 0; k < 7; ++k) {
    EXPECT_EQ(static_cast<int>(f[k].kind()), k);
    EXPECT_EQ(f[k].components(), comps[k]);
  }
}

TEST(WallValues, SegmentExamples) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{4, 0, 0});
  EXPECT_NEAR(rho3_at_wall(SpectralState::eigenstate(modes, ModeIndex::segment(1))).value, pi * pi, 1e-12);
  const double h = std::sqrt(0.5);
  const auto two = SpectralState::from_coefficients(modes, {{ModeIndex::segment(1), h}, {ModeIndex::segment(2), h}});
  EXPECT_NEAR(rho3_at_wall(two).value, pi * pi / 2, 1e-12);
  EXPECT_NEAR(wall_force(two), pi * pi / 2, 1e-12);
  EXPECT_NEAR(rho3_on_boundary(two, wall_for(Dimension::segment1D, 1.0)).integrate(), pi * pi / 2, 1e-10);
  auto disk = modes_for(Dimension::disk2D, 1.0, 0.0, Truncation{1, 0, 0});
  EXPECT_THROW(rho3_at_wall(SpectralState::eigenstate(disk, ModeIndex::disk(0, 1))), DomainError);
}

TEST(WallValues, DensitiesVanishOnWall) {
  std::mt19937_64 rng(13);
  for (Dimension d : {Dimension::segment1D, Dimension::disk2D, Dimension::sphere3D}) {
    auto modes = modes_for(d, 1.0, 0.0, Truncation{10, 2, 2});
    const auto s = random_state(modes, 8, rng);
    EXPECT_LT(rho2_on_boundary(s, wall_for(d, 1.0)).max_abs(), 1e-12);
    EXPECT_LT(rho_d_on_boundary(s, wall_for(d, 1.0)).max_abs(), 1e-12);
    EXPECT_GT(rho3_on_boundary(s, wall_for(d, 1.0)).max_abs(), 1.0);
  }
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{2, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  EXPECT_THROW(rho2_on_boundary(s, grid_for(Dimension::segment1D, 1.0, {4, 1, 1})), DomainError);
}

TEST(Force, DiskExamples) {
  auto modes = modes_for(Dimension::disk2D, 1.0, 0.0, Truncation{2, 1, 0});
  const auto ground = SpectralState::eigenstate(modes, ModeIndex::disk(0, 1));
  EXPECT_NEAR(wall_force(ground), z01() * z01(), 1e-12);
  EXPECT_NEAR(wall_pressure(ground), z01() * z01() / (2 * pi), 1e-12);
  const double h = std::sqrt(0.5);
  const auto mixed = SpectralState::from_coefficients(modes, {{ModeIndex::disk(0, 1), h}, {ModeIndex::disk(0, 2), h}});
  const double want = std::pow((z01() + z02()) * h, 2);
  EXPECT_NEAR(wall_force(mixed), want, 1e-11);
  EXPECT_NEAR(rho3_on_boundary(mixed, wall_for(Dimension::disk2D, 1.0)).integrate(), want, 1e-8 * want);
}

TEST(Force, SphereGroundStateAndPressure) {
  auto modes = modes_for(Dimension::sphere3D, 1.0, 0.0, Truncation{1, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::sphere(1, 0, 0));
  EXPECT_NEAR(wall_force(s), pi * pi, 1e-12);
  EXPECT_NEAR(wall_pressure(s), pi / 4, 1e-13);
}

TEST(Force, BoundaryQuadratureMatchesClosedForm) {
  std::mt19937_64 rng(17);
  for (Dimension d : {Dimension::disk2D, Dimension::sphere3D}) {
    auto modes = modes_for(d, 1.3, 0.0, Truncation{4, 2, 2});
    const auto s = random_state(modes, 6, rng, PhysicalConstants{1.2, 0.8});
    const double f = wall_force(s);
    EXPECT_NEAR(rho3_on_boundary(s, wall_for(d, 1.3)).integrate(), f, 1e-8 * f) << to_string(d);
  }
}

TEST(Continuity, ResidualsConvergeAtSecondOrder) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{2, 0, 0});
  const auto s = SpectralState::from_coefficients(
      modes, {{ModeIndex::segment(1), std::sqrt(0.5)}, {ModeIndex::segment(2), std::polar(std::sqrt(0.5), 0.7)}});
  for (FieldKind k : {FieldKind::rho_d, FieldKind::rho2, FieldKind::rho3}) {
    std::vector<double> hs, res;
    for (std::size_t n : {16u, 32u, 64u}) {
      const double h = 0.6 / (n - 1);
      const auto grid = SpatialGrid::from_axes(Dimension::segment1D, 1.0, {uniform_axis(n, 0.2, 0.8)});
      const auto r = continuity_residual(s, k, grid, 0.05 * h);
      EXPECT_GT(r.max_rate, 1.0);
      hs.push_back(h);
      res.push_back(r.max_residual);
    }
    EXPECT_GE(oracle::log_slope(hs, res), 1.8) << to_string(k);
  }
}

TEST(Continuity, RejectsBadArguments) {
  auto modes = modes_for(Dimension::segment1D, 1.0, 0.0, Truncation{2, 0, 0});
  const auto s = SpectralState::eigenstate(modes, ModeIndex::segment(1));
  const auto grid = SpatialGrid::from_axes(Dimension::segment1D, 1.0, {uniform_axis(8, 0.2, 0.8)});
  EXPECT_THROW(continuity_residual(s, FieldKind::flux2, grid, 1e-3), DomainError);
  EXPECT_THROW(continuity_residual(s, FieldKind::rho2, grid, 0.0), DomainError);
}
