#include "qpiston/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qpiston/errors.hpp"

namespace qpiston::specfun {

namespace {

// Below this argument the power series is used; every term is bounded by
// the first one, so there is no cancellation.
constexpr double kSeriesLimit = 2.0;

// Rescaling threshold for the downward recurrence. Squares must stay finite.
constexpr double kRescale = 1e100;

void require_order(int order) {
  if (order < 0) {
    throw DomainError("Bessel order must be non-negative, got " + std::to_string(order));
  }
}

double cylindrical_series(int p, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= p; ++k) term *= half / k;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + p));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double spherical_series(int l, double x) {
  double term = 1.0;
  for (int k = 1; k <= l; ++k) term *= x / (2.0 * k + 1.0);
  double sum = term;
  const double q = -0.5 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

int miller_start(int max_order, double x) {
  const double top = std::max(static_cast<double>(max_order), std::ceil(x));
  int start = static_cast<int>(top + 30.0 + 6.0 * std::sqrt(top));
  if (start % 2 != 0) ++start;
  return start;
}

// Miller's algorithm: recur downward from a start order where the function
// is negligible, then normalize with J_0^2 + 2 sum J_k^2 = 1.
std::vector<double> cylindrical_miller(int max_order, double x) {
  const int start = miller_start(max_order, x);
  std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
  f[start] = 1.0;
  for (int k = start; k >= 1; --k) {
    f[k - 1] = (2.0 * k / x) * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > kRescale) {
      for (int j = k - 1; j <= start + 1; ++j) f[j] /= kRescale;
    }
  }
  double sum_sq = f[0] * f[0];
  double even_sum = f[0];
  for (int k = 1; k <= start; ++k) {
    sum_sq += 2.0 * f[k] * f[k];
    if (k % 2 == 0) even_sum += 2.0 * f[k];
  }
  double scale = std::sqrt(sum_sq);
  if (even_sum < 0.0) scale = -scale;
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) out[k] = f[k] / scale;
  return out;
}

// Same scheme for j_l with sum (2l+1) j_l^2 = 1; the sign is taken from
// whichever of the closed forms j_0, j_1 is larger in magnitude.
std::vector<double> spherical_miller(int max_order, double x) {
  const int start = miller_start(max_order, x);
  std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
  f[start] = 1.0;
  for (int k = start; k >= 1; --k) {
    f[k - 1] = ((2.0 * k + 1.0) / x) * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > kRescale) {
      for (int j = k - 1; j <= start + 1; ++j) f[j] /= kRescale;
    }
  }
  double sum_sq = 0.0;
  for (int k = 0; k <= start; ++k) sum_sq += (2.0 * k + 1.0) * f[k] * f[k];
  double scale = std::sqrt(sum_sq);
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const bool use_j0 = std::abs(j0) >= std::abs(j1);
  const double reference = use_j0 ? j0 : j1;
  const double computed = use_j0 ? f[0] : f[1];
  if ((reference < 0.0) != (computed < 0.0)) scale = -scale;
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  for (int k = 0; k <= max_order; ++k) out[k] = f[k] / scale;
  return out;
}

}  // namespace

BesselOrder::BesselOrder(BesselKind kind, int order) : kind_(kind), order_(order) {
  require_order(order);
}

std::vector<double> bessel_j_sequence(BesselKind kind, int max_order, double x) {
  require_order(max_order);
  if (!(x >= 0.0)) {
    throw DomainError("Bessel argument must be non-negative, got " + std::to_string(x));
  }
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < kSeriesLimit) {
    for (int k = 0; k <= max_order; ++k) {
      out[k] = kind == BesselKind::cylindrical ? cylindrical_series(k, x) : spherical_series(k, x);
    }
    return out;
  }
  return kind == BesselKind::cylindrical ? cylindrical_miller(max_order, x)
                                         : spherical_miller(max_order, x);
}

double bessel_j(BesselOrder order, double x) {
  return bessel_j_sequence(order.kind(), order.order(), x)[order.order()];
}

double bessel_j_prime(BesselOrder order, double x) {
  if (!(x > 0.0)) {
    throw DomainError("Bessel derivative needs x > 0, got " + std::to_string(x));
  }
  const int p = order.order();
  const auto j = bessel_j_sequence(order.kind(), p + 1, x);
  if (p == 0) return -j[1];
  if (order.kind() == BesselKind::cylindrical) return 0.5 * (j[p - 1] - j[p + 1]);
  return (p * j[p - 1] - (p + 1.0) * j[p + 1]) / (2.0 * p + 1.0);
}

double bessel_j_over_x(BesselOrder order, double x) {
  const int p = order.order();
  if (p == 0) {
    if (!(x > 0.0)) throw DomainError("J_0(x)/x is singular at x = 0");
    return bessel_j(order, x) / x;
  }
  const auto j = bessel_j_sequence(order.kind(), p + 1, x);
  if (order.kind() == BesselKind::cylindrical) return (j[p - 1] + j[p + 1]) / (2.0 * p);
  return (j[p - 1] + j[p + 1]) / (2.0 * p + 1.0);
}

double cylindrical_bessel_signed(int m, double x) {
  const double value = bessel_j(BesselOrder::cylindrical(std::abs(m)), x);
  return (m < 0 && (-m) % 2 != 0) ? -value : value;
}

BesselZeroTable::BesselZeroTable(BesselOrder order, std::vector<double> zeros)
    : order_(order), zeros_(std::move(zeros)) {
  for (std::size_t i = 1; i < zeros_.size(); ++i) {
    if (!(zeros_[i] > zeros_[i - 1])) {
      throw std::invalid_argument("Bessel zero table must be strictly increasing");
    }
  }
}

double BesselZeroTable::zero(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) > zeros_.size()) {
    throw std::out_of_range("zero index " + std::to_string(n) + " outside table of size " +
                            std::to_string(zeros_.size()));
  }
  return zeros_[static_cast<std::size_t>(n) - 1];
}

BesselZeroTable bessel_zeros(BesselOrder order, int n_max) {
  if (n_max < 1) throw DomainError("n_max must be positive");
  auto f = [&](double x) { return bessel_j(order, x); };

  // Consecutive zeros are more than 2.5 apart for every order, so a scan
  // step of 0.25 cannot step over a pair. No zero lies below the order.
  constexpr double kStep = 0.25;
  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(n_max));
  double a = std::max(static_cast<double>(order.order()), 0.5);
  double fa = f(a);
  while (static_cast<int>(zeros.size()) < n_max) {
    double b = a + kStep;
    double fb = f(b);
    while ((fa < 0.0) == (fb < 0.0) && fb != 0.0) {
      a = b;
      fa = fb;
      b = a + kStep;
      fb = f(b);
    }
    double lo = a, hi = b, flo = fa;
    if (fb == 0.0) {
      lo = hi = b;
    }
    while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double z = 0.5 * (lo + hi);
    const double polished = z - f(z) / bessel_j_prime(order, z);
    if (polished >= a && polished <= b && std::abs(f(polished)) <= std::abs(f(z))) z = polished;
    if (!(std::abs(f(z)) < kZeroTolerance)) {
      throw std::runtime_error("Bessel zero refinement did not reach tolerance");
    }
    zeros.push_back(z);
    a = b;
    fa = fb;
  }
  return BesselZeroTable(order, std::move(zeros));
}

namespace {

// Normalized polynomial parts Qbar_l^m(x) of the associated Legendre
// functions, P_l^m = (-1)^m sin^m(theta) Q_l^m(cos theta), scaled so that
// |sin^m Qbar| integrates to 1/(2 pi) over the sphere, for l = m..l_max.
std::vector<double> legendre_reduced(int l_max, int m, double x) {
  std::vector<double> q(static_cast<std::size_t>(l_max) + 1, 0.0);
  if (m > l_max) return q;
  double start = (2.0 * m + 1.0) / (4.0 * std::numbers::pi);
  for (int k = 1; k <= m; ++k) start *= (2.0 * k - 1.0) / (2.0 * k);
  q[m] = std::sqrt(start);
  if (m + 1 <= l_max) q[m + 1] = x * std::sqrt(2.0 * m + 3.0) * q[m];
  for (int l = m + 2; l <= l_max; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    q[l] = a * (x * q[l - 1] - b * q[l - 2]);
  }
  return q;
}

void check_harmonic_args(int l, int m, double theta) {
  if (l < 0) throw DomainError("spherical harmonic degree must be non-negative");
  if (std::abs(m) > l) {
    throw DomainError("spherical harmonic order |m| = " + std::to_string(std::abs(m)) +
                      " exceeds degree " + std::to_string(l));
  }
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("polar angle outside [0, pi]");
  }
}

}  // namespace

HarmonicSample spherical_harmonic_sample(int l, int m, double theta, double phi) {
  check_harmonic_args(l, m, theta);
  const int am = std::abs(m);
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const double q = legendre_reduced(l, am, x)[l];
  const double q_next = am + 1 <= l ? legendre_reduced(l, am + 1, x)[l] : 0.0;
  const double sign = am % 2 == 0 ? 1.0 : -1.0;
  const double s_pow = am == 0 ? 1.0 : std::pow(s, am - 1);  // sin^{m-1}
  const std::complex<double> phase = std::polar(1.0, am * phi);

  // d/dtheta [sin^m Q(cos theta)] = sin^{m-1} (m cos Q - sin^2 dQ/dx) and
  // dQbar_l^m/dx = sqrt((l+m+1)(l-m)) Qbar_l^{m+1}.
  const double dq_dx = std::sqrt((l + am + 1.0) * (l - am)) * q_next;
  HarmonicSample out;
  const double radial = am == 0 ? q : s_pow * s * q;
  double d_theta = -s * dq_dx;
  if (am > 0) d_theta = s_pow * (am * x * q - s * s * dq_dx);
  out.value = sign * radial * phase;
  out.d_theta = sign * d_theta * phase;
  out.d_phi_over_sin = am == 0 ? std::complex<double>{}
                               : std::complex<double>(0.0, am) * (sign * s_pow * q) * phase;
  if (m < 0) {
    const double reflect = am % 2 == 0 ? 1.0 : -1.0;
    out.value = reflect * std::conj(out.value);
    out.d_theta = reflect * std::conj(out.d_theta);
    out.d_phi_over_sin = reflect * std::conj(out.d_phi_over_sin);
  }
  return out;
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  return spherical_harmonic_sample(l, m, theta, phi).value;
}

}  // namespace qpiston::specfun
