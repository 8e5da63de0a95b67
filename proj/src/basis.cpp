#include "qpiston/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "qpiston/errors.hpp"
#include "qpiston/specfun.hpp"

namespace qpiston {

namespace {

using specfun::BesselKind;
using specfun::BesselOrder;

constexpr double kPi = std::numbers::pi;

BesselKind radial_kind(Dimension d) {
  return d == Dimension::disk2D ? BesselKind::cylindrical : BesselKind::spherical;
}

int radial_order(Dimension d, const ModeIndex& mode) {
  return d == Dimension::disk2D ? std::abs(mode.m) : mode.l;
}

double mode_norm(Dimension d, const ModeIndex& mode, double z) {
  switch (d) {
    case Dimension::segment1D:
      return std::sqrt(2.0);
    case Dimension::disk2D:
      return 1.0 / (std::sqrt(kPi) *
                    specfun::bessel_j(BesselOrder::cylindrical(std::abs(mode.m) + 1), z));
    case Dimension::sphere3D:
      return std::sqrt(2.0) / specfun::bessel_j(BesselOrder::spherical(mode.l + 1), z);
  }
  return 0.0;
}

auto canonical_key(Dimension d, const ModeIndex& mode) {
  switch (d) {
    case Dimension::segment1D:
      return std::make_tuple(0, 0, mode.n);
    case Dimension::disk2D:
      return std::make_tuple(mode.m, 0, mode.n);
    case Dimension::sphere3D:
      return std::make_tuple(mode.l, mode.m, mode.n);
  }
  return std::make_tuple(0, 0, 0);
}

// sin(pi x), cos(pi x) with the argument reduced exactly, so integers give exact zeros.
double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  return sign * std::sin(kPi * r);
}

double cos_pi(double x) { return sin_pi(x + 0.5); }

}  // namespace

double boundary_sign(Dimension d, const ModeIndex& mode) {
  // The disk and sphere normalizations divide by J_{m+1}(z), j_{l+1}(z), which
  // makes every radial slope at the wall negative.
  if (d != Dimension::segment1D) return -1.0;
  return mode.n % 2 == 0 ? 1.0 : -1.0;
}

std::string to_string(Dimension d) {
  switch (d) {
    case Dimension::segment1D:
      return "1D";
    case Dimension::disk2D:
      return "2D";
    case Dimension::sphere3D:
      return "3D";
  }
  return "?";
}

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be positive");
}

WellGeometry::WellGeometry(Dimension dimension, double initial_size, double wall_speed)
    : dimension_(dimension), initial_size_(initial_size), wall_speed_(wall_speed) {
  if (!(initial_size > 0.0) || !std::isfinite(initial_size)) {
    throw DomainError("well size must be positive");
  }
  if (!std::isfinite(wall_speed)) throw DomainError("wall speed must be finite");
}

double WellGeometry::boundary_area(double t) const {
  const double s = size(t);
  switch (dimension_) {
    case Dimension::segment1D:
      return 1.0;
    case Dimension::disk2D:
      return 2.0 * kPi * s;
    case Dimension::sphere3D:
      return 4.0 * kPi * s * s;
  }
  return 0.0;
}

double WellGeometry::volume(double t) const {
  const double s = size(t);
  switch (dimension_) {
    case Dimension::segment1D:
      return s;
    case Dimension::disk2D:
      return kPi * s * s;
    case Dimension::sphere3D:
      return 4.0 / 3.0 * kPi * s * s * s;
  }
  return 0.0;
}

void WellGeometry::require_positive(double t0, double t1) const {
  if (!(size(t0) > 0.0) || !(size(t1) > 0.0)) {
    throw SingularMotionError("well collapses between t = " + std::to_string(t0) +
                              " and t = " + std::to_string(t1));
  }
}

bool ModeIndex::valid_for(Dimension d) const noexcept {
  if (n < 1) return false;
  switch (d) {
    case Dimension::segment1D:
      return l == 0 && m == 0;
    case Dimension::disk2D:
      return l == 0;
    case Dimension::sphere3D:
      return l >= 0 && std::abs(m) <= l;
  }
  return false;
}

std::string to_string(const ModeIndex& mode, Dimension d) {
  switch (d) {
    case Dimension::segment1D:
      return "(n=" + std::to_string(mode.n) + ")";
    case Dimension::disk2D:
      return "(m=" + std::to_string(mode.m) + ",n=" + std::to_string(mode.n) + ")";
    case Dimension::sphere3D:
      return "(n=" + std::to_string(mode.n) + ",l=" + std::to_string(mode.l) +
             ",m=" + std::to_string(mode.m) + ")";
  }
  return "()";
}

Eigenmode make_eigenmode(Dimension d, const ModeIndex& mode) {
  if (!mode.valid_for(d)) {
    throw DomainError("mode " + to_string(mode, d) + " is not valid for a " + to_string(d) +
                      " well");
  }
  Eigenmode out;
  out.index = mode;
  if (d == Dimension::segment1D) {
    out.z = mode.n * kPi;
  } else {
    const BesselOrder order(radial_kind(d), radial_order(d, mode));
    out.z = specfun::bessel_zeros(order, mode.n).zero(mode.n);
  }
  out.norm = mode_norm(d, mode, out.z);
  return out;
}

namespace {

std::vector<ModeIndex> enumerate_modes(const WellGeometry& geometry, const Truncation& truncation) {
  if (truncation.n_max < 1) throw DomainError("n_max must be at least 1");
  if (truncation.m_max < 0 || truncation.l_max < 0) {
    throw DomainError("angular truncations must be non-negative");
  }
  std::vector<ModeIndex> list;
  switch (geometry.dimension()) {
    case Dimension::segment1D:
      for (int n = 1; n <= truncation.n_max; ++n) list.push_back(ModeIndex::segment(n));
      break;
    case Dimension::disk2D:
      for (int m = -truncation.m_max; m <= truncation.m_max; ++m) {
        for (int n = 1; n <= truncation.n_max; ++n) list.push_back(ModeIndex::disk(m, n));
      }
      break;
    case Dimension::sphere3D:
      for (int l = 0; l <= truncation.l_max; ++l) {
        for (int m = -l; m <= l; ++m) {
          for (int n = 1; n <= truncation.n_max; ++n) list.push_back(ModeIndex::sphere(n, l, m));
        }
      }
      break;
  }
  return list;
}

}  // namespace

ModeSet::ModeSet(WellGeometry geometry, Truncation truncation)
    : ModeSet(geometry, truncation, enumerate_modes(geometry, truncation)) {}

ModeSet::ModeSet(WellGeometry geometry, Truncation truncation, std::vector<ModeIndex> modes)
    : geometry_(geometry), truncation_(truncation) {
  const Dimension d = geometry.dimension();
  for (const auto& mode : modes) {
    if (!mode.valid_for(d)) {
      throw DomainError("mode " + to_string(mode, d) + " is not valid for a " + to_string(d) +
                        " well");
    }
  }
  std::sort(modes.begin(), modes.end(), [d](const ModeIndex& a, const ModeIndex& b) {
    return canonical_key(d, a) < canonical_key(d, b);
  });
  for (std::size_t i = 1; i < modes.size(); ++i) {
    if (modes[i] == modes[i - 1]) {
      throw DomainError("duplicate mode " + to_string(modes[i], d));
    }
  }

  // One zero table per radial order, long enough for the largest n used.
  std::map<int, int> needed;
  if (d != Dimension::segment1D) {
    for (const auto& mode : modes) {
      int& top = needed[radial_order(d, mode)];
      top = std::max(top, mode.n);
    }
  }
  std::map<int, specfun::BesselZeroTable> tables;
  for (const auto& [order, n_max] : needed) {
    tables.emplace(order, specfun::bessel_zeros(BesselOrder(radial_kind(d), order), n_max));
  }

  std::map<std::pair<int, int>, int> sector_ids;
  modes_.reserve(modes.size());
  for (const auto& mode : modes) {
    Eigenmode e;
    e.index = mode;
    e.z = d == Dimension::segment1D ? mode.n * kPi
                                    : tables.at(radial_order(d, mode)).zero(mode.n);
    e.norm = mode_norm(d, mode, e.z);
    const auto key = d == Dimension::segment1D ? std::make_pair(0, 0) : std::make_pair(mode.l, mode.m);
    auto [it, inserted] = sector_ids.emplace(key, static_cast<int>(sectors_.size()));
    if (inserted) sectors_.emplace_back();
    e.sector = it->second;
    sectors_[e.sector].push_back(modes_.size());
    modes_.push_back(e);
  }
}

ModeSet ModeSet::from_modes(WellGeometry geometry, std::vector<ModeIndex> modes) {
  if (modes.empty()) throw DomainError("mode list is empty");
  Truncation t{1, 0, 0};
  for (const auto& mode : modes) {
    t.n_max = std::max(t.n_max, mode.n);
    t.m_max = std::max(t.m_max, std::abs(mode.m));
    t.l_max = std::max(t.l_max, mode.l);
  }
  return ModeSet(geometry, t, std::move(modes));
}

std::optional<std::size_t> ModeSet::find(const ModeIndex& mode) const {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].index == mode) return i;
  }
  return std::nullopt;
}

std::size_t ModeSet::index_of(const ModeIndex& mode) const {
  if (auto i = find(mode)) return *i;
  throw DomainError("mode " + to_string(mode, dimension()) + " is not in the mode set");
}

ModeSet ModeSet::with_geometry(WellGeometry geometry) const {
  if (geometry.dimension() != geometry_.dimension()) {
    throw DomainError("cannot move a mode set to a geometry of another dimension");
  }
  ModeSet out = *this;
  out.geometry_ = geometry;
  return out;
}

void require_inside(const WellGeometry& geometry, const Point& point, double t) {
  const double s = geometry.size(t);
  const double slack = 1e-12 * s;
  const double r = point[0];
  if (!(r >= -slack && r <= s + slack)) {
    throw DomainError("point outside the well: coordinate " + std::to_string(r) +
                      " not in [0, " + std::to_string(s) + "]");
  }
  if (geometry.dimension() == Dimension::sphere3D &&
      !(point[1] >= 0.0 && point[1] <= kPi)) {
    throw DomainError("polar angle outside [0, pi]");
  }
}

RadialSample radial_profile(const WellGeometry& geometry, const Eigenmode& mode, double r, double t) {
  const double s = geometry.size(t);
  const double k = mode.z / s;
  RadialSample out;
  switch (geometry.dimension()) {
    case Dimension::segment1D: {
      // sin(n pi u) with exact zeros at u = 0 and u = 1
      const double u = std::clamp(r / s, 0.0, 1.0);
      const double pref = mode.norm / std::sqrt(s);
      out.value = pref * sin_pi(mode.index.n * u);
      out.derivative = pref * k * cos_pi(mode.index.n * u);
      break;
    }
    case Dimension::disk2D: {
      const double x = std::clamp(k * r, 0.0, mode.z);
      const int p = std::abs(mode.index.m);
      const auto j = specfun::bessel_j_sequence(BesselKind::cylindrical, p + 1, x);
      // J'_p and J_p(x)/x from neighbours, finite at the origin.
      const double dj = p == 0 ? -j[1] : 0.5 * (j[p - 1] - j[p + 1]);
      const double j_over_x = p == 0 ? 0.0 : (j[p - 1] + j[p + 1]) / (2.0 * p);
      const double pref = mode.norm / s;
      out.value = pref * j[p];
      out.derivative = pref * k * dj;
      out.over_r = pref * k * j_over_x;
      break;
    }
    case Dimension::sphere3D: {
      const double x = std::clamp(k * r, 0.0, mode.z);
      const int l = mode.index.l;
      const auto j = specfun::bessel_j_sequence(BesselKind::spherical, l + 1, x);
      const double dj = l == 0 ? -j[1] : (l * j[l - 1] - (l + 1.0) * j[l + 1]) / (2.0 * l + 1.0);
      const double j_over_x = l == 0 ? 0.0 : (j[l - 1] + j[l + 1]) / (2.0 * l + 1.0);
      const double pref = mode.norm / std::pow(s, 1.5);
      out.value = pref * j[l];
      out.derivative = pref * k * dj;
      out.over_r = pref * k * j_over_x;
      break;
    }
  }
  return out;
}

ModeSample eigenfunction_sample(const WellGeometry& geometry, const Eigenmode& mode,
                                const Point& point, double t) {
  require_inside(geometry, point, t);
  const RadialSample radial = radial_profile(geometry, mode, point[0], t);
  ModeSample out;
  switch (geometry.dimension()) {
    case Dimension::segment1D:
      out.value = radial.value;
      out.gradient[0] = radial.derivative;
      break;
    case Dimension::disk2D: {
      const std::complex<double> angular = std::polar(1.0, mode.index.m * point[1]);
      out.value = angular * radial.value;
      out.gradient[0] = angular * radial.derivative;
      out.gradient[1] = angular * std::complex<double>(0.0, mode.index.m * radial.over_r);
      break;
    }
    case Dimension::sphere3D: {
      const auto y = specfun::spherical_harmonic_sample(mode.index.l, mode.index.m, point[1], point[2]);
      out.value = radial.value * y.value;
      out.gradient[0] = radial.derivative * y.value;
      out.gradient[1] = radial.over_r * y.d_theta;
      out.gradient[2] = radial.over_r * y.d_phi_over_sin;
      break;
    }
  }
  return out;
}

std::complex<double> eigenfunction(const WellGeometry& geometry, const Eigenmode& mode,
                                   const Point& point, double t) {
  return eigenfunction_sample(geometry, mode, point, t).value;
}

std::complex<double> eigenfunction(const WellGeometry& geometry, const ModeIndex& mode,
                                   const Point& point, double t) {
  return eigenfunction(geometry, make_eigenmode(geometry.dimension(), mode), point, t);
}

double instantaneous_energy(const PhysicalConstants& constants, const WellGeometry& geometry,
                            const Eigenmode& mode, double t) {
  const double s = geometry.size(t);
  return constants.hbar * constants.hbar * mode.z * mode.z / (2.0 * constants.mu * s * s);
}

double instantaneous_energy(const PhysicalConstants& constants, const WellGeometry& geometry,
                            const ModeIndex& mode, double t) {
  return instantaneous_energy(constants, geometry, make_eigenmode(geometry.dimension(), mode), t);
}

double phase_theta(const PhysicalConstants& constants, const WellGeometry& geometry,
                   const Eigenmode& mode, double t) {
  geometry.require_positive(0.0, t);
  // int_0^t dtau / (S0 + v tau)^2 = t / (S0 S(t))
  const double integral = t / (geometry.initial_size() * geometry.size(t));
  return constants.hbar * mode.z * mode.z / (2.0 * constants.mu) * integral;
}

double phase_theta(const PhysicalConstants& constants, const WellGeometry& geometry,
                   const ModeIndex& mode, double t) {
  return phase_theta(constants, geometry, make_eigenmode(geometry.dimension(), mode), t);
}

double coupling_element(const WellGeometry& geometry, const Eigenmode& a, const Eigenmode& b,
                        double t) {
  const Dimension d = geometry.dimension();
  if (a.index == b.index) return 0.0;
  if (a.index.l != b.index.l || a.index.m != b.index.m) return 0.0;
  // Boundary-slope form: (v/S) g_a'(1) g_b'(1) / (z_a^2 - z_b^2), where
  // g'(1) is sqrt(2) n pi (-1)^n on the segment and -sqrt(2) z otherwise.
  const double v_over_s = geometry.wall_speed() / geometry.size(t);
  const double sign = boundary_sign(d, a.index) * boundary_sign(d, b.index);
  return v_over_s * 2.0 * sign * a.z * b.z / (a.z * a.z - b.z * b.z);
}

double coupling_element(const WellGeometry& geometry, const ModeIndex& a, const ModeIndex& b,
                        double t) {
  const Dimension d = geometry.dimension();
  return coupling_element(geometry, make_eigenmode(d, a), make_eigenmode(d, b), t);
}

std::vector<double> coupling_matrix(const ModeSet& modes, double t) {
  const std::size_t n = modes.size();
  std::vector<double> out(n * n, 0.0);
  for (const auto& sector : modes.sectors()) {
    for (std::size_t i : sector) {
      for (std::size_t j : sector) {
        out[i * n + j] = coupling_element(modes.geometry(), modes[i], modes[j], t);
      }
    }
  }
  return out;
}

}  // namespace qpiston
