#pragma once

// Instantaneous eigenbases of an infinite well whose size grows linearly in
// time: the segment [0, L(t)], the disk r <= R(t) and the ball r <= R(t),
// with L(t), R(t) = S0 + v t.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace qpiston {

enum class Dimension { segment1D = 1, disk2D = 2, sphere3D = 3 };

inline int rank(Dimension d) noexcept { return static_cast<int>(d); }
std::string to_string(Dimension d);

struct PhysicalConstants {
  double hbar = 1.0;
  double mu = 1.0;

  void validate() const;
  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;
};

class WellGeometry {
 public:
  WellGeometry(Dimension dimension, double initial_size, double wall_speed);

  Dimension dimension() const noexcept { return dimension_; }
  double initial_size() const noexcept { return initial_size_; }
  double wall_speed() const noexcept { return wall_speed_; }

  double size(double t) const noexcept { return initial_size_ + wall_speed_ * t; }
  /// Boundary measure: 1 for the segment wall, 2 pi R, 4 pi R^2.
  double boundary_area(double t) const;
  /// Domain measure: L, pi R^2, 4/3 pi R^3.
  double volume(double t) const;

  /// Throws SingularMotionError if the size is not positive on [t0, t1].
  void require_positive(double t0, double t1) const;

  WellGeometry with_speed(double speed) const { return {dimension_, initial_size_, speed}; }

  friend bool operator==(const WellGeometry&, const WellGeometry&) = default;

 private:
  Dimension dimension_;
  double initial_size_;
  double wall_speed_;
};

/// Quantum numbers. The segment uses n; the disk (m, n); the sphere (n, l, m).
struct ModeIndex {
  int n = 1;
  int l = 0;
  int m = 0;

  static ModeIndex segment(int n) { return {n, 0, 0}; }
  static ModeIndex disk(int m, int n) { return {n, 0, m}; }
  static ModeIndex sphere(int n, int l, int m) { return {n, l, m}; }

  bool valid_for(Dimension d) const noexcept;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

std::string to_string(const ModeIndex& mode, Dimension d);

/// Caps on the mode sums. m_max applies to the disk, l_max to the sphere.
struct Truncation {
  int n_max = 1;
  int m_max = 0;
  int l_max = 0;

  friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// A mode with its size-independent data resolved.
struct Eigenmode {
  ModeIndex index;
  double z = 0.0;     // n pi, z_{|m|,n} or z_{l,n}
  double norm = 0.0;  // prefactor at unit size
  int sector = 0;     // angular sector id inside a ModeSet
};

Eigenmode make_eigenmode(Dimension d, const ModeIndex& mode);

/// Immutable, canonically ordered list of modes for one geometry.
/// Ordering: segment by n; disk by (m ascending, n); sphere by (l, m, n).
class ModeSet {
 public:
  ModeSet(WellGeometry geometry, Truncation truncation);

  /// Arbitrary subset of modes; sorted into canonical order. Duplicates and
  /// modes invalid for the geometry are rejected.
  static ModeSet from_modes(WellGeometry geometry, std::vector<ModeIndex> modes);

  const WellGeometry& geometry() const noexcept { return geometry_; }
  const Truncation& truncation() const noexcept { return truncation_; }
  Dimension dimension() const noexcept { return geometry_.dimension(); }

  std::size_t size() const noexcept { return modes_.size(); }
  const std::vector<Eigenmode>& modes() const noexcept { return modes_; }
  const Eigenmode& operator[](std::size_t i) const { return modes_[i]; }

  std::optional<std::size_t> find(const ModeIndex& mode) const;
  std::size_t index_of(const ModeIndex& mode) const;

  /// Mode indices grouped by angular quantum numbers; couplings never cross groups.
  const std::vector<std::vector<std::size_t>>& sectors() const noexcept { return sectors_; }

  ModeSet with_geometry(WellGeometry geometry) const;

 private:
  ModeSet(WellGeometry geometry, Truncation truncation, std::vector<ModeIndex> modes);

  WellGeometry geometry_;
  Truncation truncation_;
  std::vector<Eigenmode> modes_;
  std::vector<std::vector<std::size_t>> sectors_;
};

/// Sign of the outward normal derivative of the mode at the wall: (-1)^n on
/// the segment, -1 for the disk and the sphere.
double boundary_sign(Dimension d, const ModeIndex& mode);

/// Coordinates: x for the segment, (r, phi) for the disk, (r, theta, phi)
/// for the sphere. Unused entries are ignored.
using Point = std::array<double, 3>;

/// Eigenfunction value with its gradient in the local orthonormal frame
/// (x-hat; r-hat, phi-hat; r-hat, theta-hat, phi-hat).
struct ModeSample {
  std::complex<double> value;
  std::array<std::complex<double>, 3> gradient{};
};

/// Radial factor of a mode: the full mode in 1D, the Bessel part in 2D/3D
/// (phi_a = R(r) e^{i m phi} or R(r) Y_lm). over_r is R(r)/r up to the
/// angular factor, finite at the origin: J_p(kr)/r, j_l(kr)/r scaled alike.
struct RadialSample {
  double value = 0.0;
  double derivative = 0.0;
  double over_r = 0.0;
};

RadialSample radial_profile(const WellGeometry& geometry, const Eigenmode& mode, double r, double t);

std::complex<double> eigenfunction(const WellGeometry& geometry, const ModeIndex& mode,
                                   const Point& point, double t);
std::complex<double> eigenfunction(const WellGeometry& geometry, const Eigenmode& mode,
                                   const Point& point, double t);
ModeSample eigenfunction_sample(const WellGeometry& geometry, const Eigenmode& mode,
                                const Point& point, double t);

/// Throws DomainError if the point lies outside the closed domain at time t.
void require_inside(const WellGeometry& geometry, const Point& point, double t);

double instantaneous_energy(const PhysicalConstants& constants, const WellGeometry& geometry,
                            const ModeIndex& mode, double t);
double instantaneous_energy(const PhysicalConstants& constants, const WellGeometry& geometry,
                            const Eigenmode& mode, double t);

/// theta(t) = (1/hbar) int_0^t E(tau) dtau, closed form for linear motion.
double phase_theta(const PhysicalConstants& constants, const WellGeometry& geometry,
                   const ModeIndex& mode, double t);
double phase_theta(const PhysicalConstants& constants, const WellGeometry& geometry,
                   const Eigenmode& mode, double t);

/// <phi_a | d/dt phi_b> over the instantaneous domain.
double coupling_element(const WellGeometry& geometry, const ModeIndex& a, const ModeIndex& b,
                        double t);
double coupling_element(const WellGeometry& geometry, const Eigenmode& a, const Eigenmode& b,
                        double t);

/// Dense row-major matrix M_ab = coupling_element(a, b, t) over a mode set.
std::vector<double> coupling_matrix(const ModeSet& modes, double t);

}  // namespace qpiston
