#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qpiston/basis.hpp"
#include "qpiston/errors.hpp"

using namespace qpiston;
using oracle::pi;

namespace {

const PhysicalConstants kUnit{};

// Disk eigenfunction built from the standard library Bessel functions and a
// bisected zero: J_|m|(z r/R) e^{i m phi} / (sqrt(pi) R J_{|m|+1}(z)).
struct DiskOracle {
  int m, n;
  double z;
  DiskOracle(int m_, int n_) : m(m_), n(n_) {
    const int am = std::abs(m);
    const auto brackets = oracle::sign_scan([am](double x) { return std::cyl_bessel_j(am, x); }, 0.5, 60.0, 0.05, n);
    const double c = brackets.at(n - 1);
    z = oracle::bisect([am](double x) { return std::cyl_bessel_j(am, x); }, c - 0.05, c + 0.05);
  }
  double radial(double r, double R) const {
    const int am = std::abs(m);
    return std::cyl_bessel_j(am, z * r / R) / (std::sqrt(pi) * R * std::cyl_bessel_j(am + 1, z));
  }
};

}  // namespace

TEST(Eigenfunction, SegmentMidpointValues) {
  const WellGeometry g(Dimension::segment1D, 1.0, 0.0);
  EXPECT_NEAR(std::real(eigenfunction(g, ModeIndex::segment(1), {0.5, 0, 0}, 0.0)), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(std::abs(eigenfunction(g, ModeIndex::segment(2), {0.5, 0, 0}, 0.0)), 0.0);
}

TEST(Eigenfunction, SegmentVanishesExactlyAtWalls) {
  const WellGeometry g(Dimension::segment1D, 1.3, 0.2);
  for (int n = 1; n <= 64; ++n) {
    EXPECT_EQ(std::abs(eigenfunction(g, ModeIndex::segment(n), {g.size(0.7), 0, 0}, 0.7)), 0.0);
    EXPECT_EQ(std::abs(eigenfunction(g, ModeIndex::segment(n), {0.0, 0, 0}, 0.7)), 0.0);
  }
}

TEST(Eigenfunction, MatchesSegmentOracle) {
  const WellGeometry g(Dimension::segment1D, 0.8, 0.3);
  const double t = 0.4, L = g.size(t);
  for (int n : {1, 2, 7, 30}) {
    for (double x : {0.05, 0.31, 0.77, L}) {
      EXPECT_NEAR(std::real(eigenfunction(g, ModeIndex::segment(n), {x, 0, 0}, t)), oracle::segment_mode(n, x, L), 1e-13);
    }
  }
}

TEST(Eigenfunction, DiskGroundModeNormalizedByQuadrature) {
  const WellGeometry g(Dimension::disk2D, 1.0, 0.0);
  const auto mode = ModeIndex::disk(0, 1);
  const double at_half = std::abs(eigenfunction(g, mode, {0.5, 0.0, 0}, 0.0));
  EXPECT_GT(at_half, 0.0);
  const double integral = 2.0 * pi * oracle::simpson(
      [&](double r) { return std::norm(eigenfunction(g, mode, {r, 0.0, 0}, 0.0)) * r; }, 0.0, 1.0, 4000);
  EXPECT_NEAR(integral, 1.0, 1e-8);
}

TEST(Eigenfunction, DiskMatchesStandardLibraryOracle) {
  const WellGeometry g(Dimension::disk2D, 1.4, 0.0);
  for (auto [m, n] : {std::pair{0, 1}, {1, 2}, {-2, 3}, {5, 1}}) {
    const DiskOracle o(m, n);
    for (double r : {0.0, 0.2, 0.9, 1.4}) {
      const double phi = 0.8;
      const auto want = o.radial(r, 1.4) * std::polar(1.0, m * phi);
      const auto got = eigenfunction(g, ModeIndex::disk(m, n), {r, phi, 0}, 0.0);
      EXPECT_NEAR(std::abs(got - want), 0.0, 1e-12) << m << "," << n << " r=" << r;
    }
  }
}

TEST(Eigenfunction, SphereMatchesStandardLibraryOracle) {
  const WellGeometry g(Dimension::sphere3D, 1.0, 0.0);
  // (n=1, l=1, m=0): sqrt(2) j_1(z r) Y_10 / j_2(z) with z the first zero of j_1.
  const double z = oracle::bisect([](double x) { return std::sph_bessel(1, x); }, 4.0, 5.0);
  for (double r : {0.1, 0.5, 0.95}) {
    const double th = 0.6;
    const double y10 = std::sph_legendre(1, 0, th);
    const double want = std::sqrt(2.0) * std::sph_bessel(1, z * r) * y10 / std::sph_bessel(2, z);
    EXPECT_NEAR(std::real(eigenfunction(g, ModeIndex::sphere(1, 1, 0), {r, th, 0.3}, 0.0)), want, 1e-12);
  }
}

TEST(Eigenfunction, OutsidePointsRejected) {
  const WellGeometry g(Dimension::segment1D, 1.0, 0.5);
  EXPECT_THROW(eigenfunction(g, ModeIndex::segment(1), {1.2, 0, 0}, 0.0), DomainError);
  EXPECT_NO_THROW(eigenfunction(g, ModeIndex::segment(1), {1.2, 0, 0}, 1.0));
  EXPECT_THROW(eigenfunction(g, ModeIndex::segment(1), {-0.1, 0, 0}, 0.0), DomainError);
  const WellGeometry d(Dimension::sphere3D, 1.0, 0.0);
  EXPECT_THROW(eigenfunction(d, ModeIndex::sphere(1, 0, 0), {0.5, 4.0, 0}, 0.0), DomainError);
}

TEST(Eigenfunction, InvalidModesRejected) {
  const WellGeometry g(Dimension::sphere3D, 1.0, 0.0);
  EXPECT_THROW(eigenfunction(g, ModeIndex::sphere(1, 1, 2), {0.5, 1, 0}, 0.0), DomainError);
  EXPECT_THROW(eigenfunction(g, ModeIndex::sphere(0, 0, 0), {0.5, 1, 0}, 0.0), DomainError);
}

TEST(Eigenfunction, GradientMatchesFiniteDifferences) {
  const double h = 1e-6;
  {
    const WellGeometry g(Dimension::segment1D, 1.0, 0.0);
    const auto m = make_eigenmode(Dimension::segment1D, ModeIndex::segment(3));
    const auto s = eigenfunction_sample(g, m, {0.37, 0, 0}, 0.0);
    const double fd = (oracle::segment_mode(3, 0.37 + h, 1.0) - oracle::segment_mode(3, 0.37 - h, 1.0)) / (2 * h);
    EXPECT_NEAR(std::real(s.gradient[0]), fd, 1e-7);
  }
  {
    const WellGeometry g(Dimension::disk2D, 1.0, 0.0);
    const auto m = make_eigenmode(Dimension::disk2D, ModeIndex::disk(2, 1));
    const double r = 0.6, ph = 0.9;
    const auto s = eigenfunction_sample(g, m, {r, ph, 0}, 0.0);
    auto f = [&](double rr, double pp) { return eigenfunction(g, m, {rr, pp, 0}, 0.0); };
    EXPECT_NEAR(std::abs(s.gradient[0] - (f(r + h, ph) - f(r - h, ph)) / (2 * h)), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(s.gradient[1] - (f(r, ph + h) - f(r, ph - h)) / (2 * h * r)), 0.0, 1e-7);
  }
  {
    const WellGeometry g(Dimension::sphere3D, 1.0, 0.0);
    const auto m = make_eigenmode(Dimension::sphere3D, ModeIndex::sphere(2, 2, -1));
    const double r = 0.55, th = 1.2, ph = 0.4;
    const auto s = eigenfunction_sample(g, m, {r, th, ph}, 0.0);
    auto f = [&](double a, double b, double c) { return eigenfunction(g, m, {a, b, c}, 0.0); };
    EXPECT_NEAR(std::abs(s.gradient[0] - (f(r + h, th, ph) - f(r - h, th, ph)) / (2 * h)), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(s.gradient[1] - (f(r, th + h, ph) - f(r, th - h, ph)) / (2 * h * r)), 0.0, 1e-7);
    EXPECT_NEAR(std::abs(s.gradient[2] - (f(r, th, ph + h) - f(r, th, ph - h)) / (2 * h * r * std::sin(th))), 0.0,
                1e-7);
  }
}

TEST(Eigenfunction, OriginLimitsFinite) {
  const WellGeometry g(Dimension::disk2D, 1.0, 0.0);
  const auto m1 = make_eigenmode(Dimension::disk2D, ModeIndex::disk(1, 1));
  const auto s = eigenfunction_sample(g, m1, {0.0, 0.3, 0}, 0.0);
  EXPECT_TRUE(std::isfinite(std::abs(s.gradient[0])));
  EXPECT_TRUE(std::isfinite(std::abs(s.gradient[1])));
  const auto near = eigenfunction_sample(g, m1, {1e-7, 0.3, 0}, 0.0);
  EXPECT_NEAR(std::abs(s.gradient[0] - near.gradient[0]), 0.0, 1e-5);
  EXPECT_NEAR(std::abs(s.gradient[1] - near.gradient[1]), 0.0, 1e-5);
}

TEST(Energy, ClosedFormExamples) {
  EXPECT_NEAR(instantaneous_energy(kUnit, {Dimension::segment1D, 1.0, 0.0}, ModeIndex::segment(1), 0.0),
              pi * pi / 2, 1e-13);
  EXPECT_NEAR(instantaneous_energy(kUnit, {Dimension::sphere3D, 1.0, 0.0}, ModeIndex::sphere(1, 0, 0), 0.0),
              pi * pi / 2, 1e-12);
  const double z01 = oracle::bisect([](double x) { return oracle::series_bessel_j(0, x, 60); }, 2.0, 3.0);
  EXPECT_NEAR(instantaneous_energy(kUnit, {Dimension::disk2D, 1.0, 0.0}, ModeIndex::disk(0, 1), 0.0),
              z01 * z01 / 2, 1e-12);
}

TEST(Energy, ScalesWithSizeAndConstants) {
  const PhysicalConstants c{0.7, 2.5};
  const WellGeometry g(Dimension::segment1D, 1.0, 0.4);
  const double t = 1.5, L = g.size(t);
  EXPECT_NEAR(instantaneous_energy(c, g, ModeIndex::segment(4), t), c.hbar * c.hbar * 16 * pi * pi / (2 * c.mu * L * L),
              1e-12);
}

TEST(Phase, ClosedFormExamples) {
  EXPECT_EQ(phase_theta(kUnit, {Dimension::segment1D, 1.0, 0.3}, ModeIndex::segment(5), 0.0), 0.0);
  EXPECT_NEAR(phase_theta(kUnit, {Dimension::segment1D, 1.0, 0.0}, ModeIndex::segment(1), 2.0), pi * pi, 1e-12);
  EXPECT_NEAR(phase_theta(kUnit, {Dimension::segment1D, 1.0, 0.5}, ModeIndex::segment(1), 1.0), pi * pi / 3, 1e-12);
}

TEST(Phase, MatchesAdaptiveQuadratureOfEnergy) {
  const WellGeometry g(Dimension::segment1D, 1.0, 0.5);
  const double q = oracle::adaptive_simpson(
      [](double tau) { return pi * pi / (2.0 * (1.0 + 0.5 * tau) * (1.0 + 0.5 * tau)); }, 0.0, 1.0, 1e-14);
  EXPECT_NEAR(phase_theta(kUnit, g, ModeIndex::segment(1), 1.0), q, 1e-12);
  // contracting wall, non-unit constants, a disk mode
  const PhysicalConstants c{1.3, 0.6};
  const WellGeometry d(Dimension::disk2D, 2.0, -0.4);
  const auto m = make_eigenmode(Dimension::disk2D, ModeIndex::disk(1, 2));
  const double qd = oracle::adaptive_simpson([&](double tau) { return instantaneous_energy(c, d, m, tau) / c.hbar; },
                                             0.0, 3.0, 1e-13);
  EXPECT_NEAR(phase_theta(c, d, m, 3.0), qd, 1e-11 * std::abs(qd));
}

TEST(Phase, CollapseRaises) {
  const WellGeometry g(Dimension::segment1D, 1.0, -1.0);
  EXPECT_THROW(phase_theta(kUnit, g, ModeIndex::segment(1), 1.5), SingularMotionError);
}

TEST(Coupling, SegmentExamples) {
  const WellGeometry g(Dimension::segment1D, 1.0, 1.0);
  EXPECT_EQ(coupling_element(g, ModeIndex::segment(3), ModeIndex::segment(3), 0.4), 0.0);
  EXPECT_NEAR(coupling_element(g, ModeIndex::segment(1), ModeIndex::segment(2), 0.0), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(coupling_element(g, ModeIndex::segment(2), ModeIndex::segment(1), 0.0), -4.0 / 3.0, 1e-14);
}

TEST(Coupling, SegmentMatchesQuadratureOracle) {
  const double v = 0.7, t = 0.3;
  const WellGeometry g(Dimension::segment1D, 1.1, v);
  const double L = g.size(t);
  for (int a = 1; a <= 12; ++a) {
    for (int b = 1; b <= 12; ++b) {
      const double q = v * oracle::simpson(
          [&](double x) { return oracle::segment_mode(a, x, L) * oracle::segment_mode_dL(b, x, L); }, 0.0, L, 40000);
      EXPECT_NEAR(coupling_element(g, ModeIndex::segment(a), ModeIndex::segment(b), t), q, 1e-10) << a << "," << b;
    }
  }
}

TEST(Coupling, DiskSectorsDecouple) {
  const WellGeometry g(Dimension::disk2D, 1.0, 1.0);
  EXPECT_EQ(coupling_element(g, ModeIndex::disk(0, 1), ModeIndex::disk(1, 1), 0.0), 0.0);
}

TEST(Coupling, DiskMatchesQuadratureOracle) {
  const WellGeometry g(Dimension::disk2D, 1.0, 1.0);
  const DiskOracle a(0, 1), b(0, 2);
  const double dR = 1e-5;
  // the phi integral of e^{0} gives 2 pi; d/dt = v d/dR.
  const double q = 2.0 * pi * oracle::simpson(
                                  [&](double r) {
                                    const double db = (b.radial(r, 1.0 + dR) - b.radial(r, 1.0 - dR)) / (2 * dR);
                                    return a.radial(r, 1.0) * db * r;
                                  },
                                  0.0, 1.0, 4000);
  EXPECT_NEAR(coupling_element(g, ModeIndex::disk(0, 1), ModeIndex::disk(0, 2), 0.0), q, 1e-8);
}

TEST(Coupling, SphereMatchesQuadratureOracle) {
  const WellGeometry g(Dimension::sphere3D, 1.0, 1.0);
  const double za = oracle::bisect([](double x) { return std::sph_bessel(1, x); }, 4.0, 5.0);
  const double zb = oracle::bisect([](double x) { return std::sph_bessel(1, x); }, 7.0, 8.0);
  auto radial = [](double z, double r, double R) {
    return std::sqrt(2.0) * std::sph_bessel(1, z * r / R) / (std::pow(R, 1.5) * std::sph_bessel(2, z));
  };
  const double dR = 1e-5;
  const double q = oracle::simpson(
      [&](double r) {
        const double db = (radial(zb, r, 1.0 + dR) - radial(zb, r, 1.0 - dR)) / (2 * dR);
        return radial(za, r, 1.0) * db * r * r;
      },
      0.0, 1.0, 4000);
  EXPECT_NEAR(coupling_element(g, ModeIndex::sphere(1, 1, 1), ModeIndex::sphere(2, 1, 1), 0.0), q, 1e-8);
  EXPECT_EQ(coupling_element(g, ModeIndex::sphere(1, 1, 1), ModeIndex::sphere(2, 1, 0), 0.0), 0.0);
}

TEST(Coupling, AntisymmetricAndScalesAsSpeedOverSize) {
  const WellGeometry g(Dimension::segment1D, 1.0, 0.3);
  const ModeSet modes(g, Truncation{64, 0, 0});
  const auto m0 = coupling_matrix(modes, 0.0);
  const auto m1 = coupling_matrix(modes, 2.0);
  const std::size_t n = modes.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_LE(std::abs(m0[i * n + j] + m0[j * n + i]), 1e-10 * std::max(1.0, std::abs(m0[i * n + j])));
      EXPECT_NEAR(m1[i * n + j], m0[i * n + j] * g.size(0.0) / g.size(2.0), 1e-12 * std::abs(m0[i * n + j]) + 1e-300);
    }
  }
}

TEST(ModeSetOrder, CanonicalOrderingAndSectors) {
  const ModeSet disk({Dimension::disk2D, 1.0, 0.0}, Truncation{2, 1, 0});
  ASSERT_EQ(disk.size(), 6u);
  EXPECT_EQ(disk[0].index, ModeIndex::disk(-1, 1));
  EXPECT_EQ(disk[5].index, ModeIndex::disk(1, 2));
  EXPECT_EQ(disk.sectors().size(), 3u);
  const ModeSet ball({Dimension::sphere3D, 1.0, 0.0}, Truncation{2, 0, 1});
  EXPECT_EQ(ball.size(), 8u);
  EXPECT_EQ(ball.sectors().size(), 4u);
  EXPECT_EQ(ball.index_of(ModeIndex::sphere(2, 1, 1)), 7u);
  EXPECT_THROW(ball.index_of(ModeIndex::sphere(3, 0, 0)), DomainError);
  EXPECT_THROW(ModeSet::from_modes({Dimension::segment1D, 1.0, 0.0}, {ModeIndex::segment(2), ModeIndex::segment(2)}),
               DomainError);
}

TEST(Orthonormality, GramMatricesByQuadrature) {
  {
    const WellGeometry g(Dimension::segment1D, 1.0, 0.0);
    for (int a = 1; a <= 6; ++a) {
      for (int b = 1; b <= 6; ++b) {
        const double q = oracle::simpson(
            [&](double x) { return std::real(eigenfunction(g, ModeIndex::segment(a), {x, 0, 0}, 0.0)) *
                                   std::real(eigenfunction(g, ModeIndex::segment(b), {x, 0, 0}, 0.0)); },
            0.0, 1.0, 2000);
        EXPECT_NEAR(q, a == b ? 1.0 : 0.0, 1e-10);
      }
    }
  }
  {
    // radial Gram within the m = 2 sector
    const WellGeometry g(Dimension::disk2D, 1.0, 0.0);
    for (int a = 1; a <= 4; ++a) {
      for (int b = 1; b <= 4; ++b) {
        const auto ma = make_eigenmode(Dimension::disk2D, ModeIndex::disk(2, a));
        const auto mb = make_eigenmode(Dimension::disk2D, ModeIndex::disk(2, b));
        const double q = 2.0 * pi * oracle::simpson(
            [&](double r) {
              return std::real(std::conj(eigenfunction(g, ma, {r, 0.0, 0}, 0.0)) *
                               eigenfunction(g, mb, {r, 0.0, 0}, 0.0)) * r;
            },
            0.0, 1.0, 4000);
        EXPECT_NEAR(q, a == b ? 1.0 : 0.0, 1e-9);
      }
    }
  }
  {
    const WellGeometry g(Dimension::sphere3D, 1.0, 0.0);
    for (int a = 1; a <= 4; ++a) {
      for (int b = 1; b <= 4; ++b) {
        const auto ma = make_eigenmode(Dimension::sphere3D, ModeIndex::sphere(a, 2, 0));
        const auto mb = make_eigenmode(Dimension::sphere3D, ModeIndex::sphere(b, 2, 0));
        // Y_{2,0} integrates to 1 over the sphere, so only the radial part remains.
        const double th = 0.5;
        const double y = std::sph_legendre(2, 0, th);
        const double q = oracle::simpson(
            [&](double r) {
              return std::real(eigenfunction(g, ma, {r, th, 0}, 0.0)) *
                     std::real(eigenfunction(g, mb, {r, th, 0}, 0.0)) * r * r;
            },
            0.0, 1.0, 4000) / (y * y);
        EXPECT_NEAR(q, a == b ? 1.0 : 0.0, 1e-9);
      }
    }
  }
}

TEST(BoundarySign, MatchesWallSlope) {
  const WellGeometry g(Dimension::segment1D, 1.0, 0.0);
  for (int n = 1; n <= 6; ++n) {
    const auto m = make_eigenmode(Dimension::segment1D, ModeIndex::segment(n));
    const auto s = eigenfunction_sample(g, m, {1.0, 0, 0}, 0.0);
    EXPECT_EQ(std::copysign(1.0, std::real(s.gradient[0])), boundary_sign(Dimension::segment1D, m.index));
  }
  const WellGeometry d(Dimension::disk2D, 1.0, 0.0);
  for (int m = -3; m <= 3; ++m) {
    for (int n = 1; n <= 4; ++n) {
      const auto e = make_eigenmode(Dimension::disk2D, ModeIndex::disk(m, n));
      EXPECT_LT(radial_profile(d, e, 1.0, 0.0).derivative, 0.0);
    }
  }
}

TEST(Geometry, CollapseDetected) {
  const WellGeometry g(Dimension::disk2D, 1.0, -0.5);
  EXPECT_NO_THROW(g.require_positive(0.0, 1.9));
  EXPECT_THROW(g.require_positive(0.0, 2.0), SingularMotionError);
  EXPECT_THROW(WellGeometry(Dimension::segment1D, 0.0, 0.0), DomainError);
  EXPECT_NEAR(WellGeometry(Dimension::sphere3D, 2.0, 0.0).boundary_area(0.0), 16 * pi, 1e-12);
  EXPECT_NEAR(WellGeometry(Dimension::disk2D, 2.0, 0.0).boundary_area(0.0), 4 * pi, 1e-12);
  EXPECT_EQ(WellGeometry(Dimension::segment1D, 2.0, 0.0).boundary_area(0.0), 1.0);
}
