#pragma once

// Special-function kernel for the disk and sphere eigenbases: integer-order
// cylindrical Bessel functions J_m, spherical Bessel functions j_l, their
// derivatives and positive zeros, and orthonormal spherical harmonics.

#include <complex>
#include <cstddef>
#include <vector>

namespace qpiston::specfun {

enum class BesselKind { cylindrical, spherical };

/// Order of a Bessel function. Negative cylindrical orders are folded with
/// J_{-m} = (-1)^m J_m by callers before they reach this type.
class BesselOrder {
 public:
  BesselOrder(BesselKind kind, int order);

  static BesselOrder cylindrical(int m) { return {BesselKind::cylindrical, m}; }
  static BesselOrder spherical(int l) { return {BesselKind::spherical, l}; }

  BesselKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }

  friend bool operator==(const BesselOrder&, const BesselOrder&) = default;

 private:
  BesselKind kind_;
  int order_;
};

/// J_m(x) or j_l(x) for x >= 0. Throws DomainError for x < 0.
double bessel_j(BesselOrder order, double x);

/// Values of orders 0..max_order (inclusive) at x, from a single normalized
/// downward recurrence (or the power series near the origin).
std::vector<double> bessel_j_sequence(BesselKind kind, int max_order, double x);

/// Derivative with respect to x, for x > 0. Satisfies
/// J'_p(x) = (p/x) J_p(x) - J_{p+1}(x) and its spherical analogue.
double bessel_j_prime(BesselOrder order, double x);

/// J_p(x)/x (cylindrical, p >= 1) or j_l(x)/x (spherical, l >= 1), evaluated
/// without dividing by x so the x -> 0 limit is finite.
double bessel_j_over_x(BesselOrder order, double x);

/// Reflection J_{-m}(x) = (-1)^m J_m(x) for any integer m.
double cylindrical_bessel_signed(int m, double x);

/// First positive zeros of a Bessel function, strictly increasing.
class BesselZeroTable {
 public:
  BesselZeroTable(BesselOrder order, std::vector<double> zeros);

  BesselOrder order() const noexcept { return order_; }
  const std::vector<double>& zeros() const noexcept { return zeros_; }
  std::size_t size() const noexcept { return zeros_.size(); }
  /// 1-based, matching z_{m,n}.
  double zero(int n) const;

 private:
  BesselOrder order_;
  std::vector<double> zeros_;
};

/// Zeros to |J(z)| < 1e-12, found by sign scan, bisection and a Newton polish.
BesselZeroTable bessel_zeros(BesselOrder order, int n_max);

/// Residual bound every zero table entry satisfies.
inline constexpr double kZeroTolerance = 1e-12;

/// Orthonormal Y_{l,m} with the Condon-Shortley phase.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

/// Y_{l,m} together with the components of r grad Y_{l,m} (the vector
/// harmonic Psi_{l,m}) in the (theta-hat, phi-hat) frame. Both components
/// are finite at the poles.
struct HarmonicSample {
  std::complex<double> value;
  std::complex<double> d_theta;        // dY/dtheta
  std::complex<double> d_phi_over_sin; // (1/sin theta) dY/dphi
};

HarmonicSample spherical_harmonic_sample(int l, int m, double theta, double phi);

}  // namespace qpiston::specfun
