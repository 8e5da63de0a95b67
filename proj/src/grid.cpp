#include "qpiston/grid.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <stdexcept>

#include "qpiston/errors.hpp"

namespace qpiston {

namespace {

constexpr double kPi = std::numbers::pi;

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GridAxis gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  GridAxis axis;
  axis.nodes.resize(n);
  axis.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    axis.nodes[i] = mid - half * x;
    axis.nodes[n - 1 - i] = mid + half * x;
    axis.weights[i] = axis.weights[n - 1 - i] = half * w;
  }
  return axis;
}

GridAxis midpoint_axis(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("midpoint rule needs at least one cell");
  GridAxis axis;
  const double h = (b - a) / n;
  for (std::size_t i = 0; i < n; ++i) {
    axis.nodes.push_back(a + (i + 0.5) * h);
    axis.weights.push_back(h);
  }
  return axis;
}

GridAxis uniform_axis(std::size_t n, double a, double b) {
  if (n < 2) throw std::invalid_argument("uniform axis needs at least two nodes");
  GridAxis axis;
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    axis.nodes.push_back(i + 1 == n ? b : a + i * h);
    axis.weights.push_back(i == 0 || i + 1 == n ? 0.5 * h : h);
  }
  return axis;
}

GridAxis periodic_axis(std::size_t n) {
  if (n == 0) throw std::invalid_argument("periodic axis needs at least one node");
  GridAxis axis;
  const double h = 2.0 * kPi / n;
  for (std::size_t i = 0; i < n; ++i) {
    axis.nodes.push_back(i * h);
    axis.weights.push_back(h);
  }
  return axis;
}

SpatialGrid::SpatialGrid(Dimension dimension, double size, std::vector<GridAxis> axes,
                         bool boundary)
    : dimension_(dimension), size_(size), axes_(std::move(axes)), boundary_(boundary) {
  if (!(size > 0.0)) throw DomainError("grid size must be positive");
  if (axes_.empty() || axes_.size() > 3) throw std::invalid_argument("grid needs 1 to 3 axes");
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const auto& ax = axes_[k];
    if (ax.nodes.empty()) throw std::invalid_argument("grid axis is empty");
    if (!ax.weights.empty() && ax.weights.size() != ax.nodes.size()) {
      throw std::invalid_argument("grid axis weights do not match its nodes");
    }
    shape_[k] = ax.nodes.size();
  }
}

SpatialGrid SpatialGrid::from_axes(Dimension dimension, double size, std::vector<GridAxis> axes) {
  if (static_cast<int>(axes.size()) != rank(dimension)) {
    throw std::invalid_argument("axis count must equal the dimension");
  }
  const double slack = 1e-12 * size;
  for (double r : axes[0].nodes) {
    if (r < -slack || r > size + slack) throw DomainError("grid node outside the well");
  }
  if (dimension == Dimension::sphere3D) {
    for (double th : axes[1].nodes) {
      if (th < 0.0 || th > kPi) throw DomainError("polar grid node outside [0, pi]");
    }
  }
  return SpatialGrid(dimension, size, std::move(axes), false);
}

SpatialGrid SpatialGrid::quadrature(Dimension dimension, double size,
                                    std::array<std::size_t, 3> counts) {
  switch (dimension) {
    case Dimension::segment1D:
      return SpatialGrid(dimension, size, {midpoint_axis(counts[0], 0.0, size)}, false);
    case Dimension::disk2D: {
      GridAxis r = gauss_legendre(counts[0], 0.0, size);
      for (std::size_t i = 0; i < r.size(); ++i) r.weights[i] *= r.nodes[i];
      return SpatialGrid(dimension, size, {std::move(r), periodic_axis(counts[1])}, false);
    }
    case Dimension::sphere3D: {
      GridAxis r = gauss_legendre(counts[0], 0.0, size);
      for (std::size_t i = 0; i < r.size(); ++i) r.weights[i] *= r.nodes[i] * r.nodes[i];
      // Gauss-Legendre in cos(theta): the weights already carry sin(theta) dtheta.
      GridAxis mu = gauss_legendre(counts[1], -1.0, 1.0);
      GridAxis theta;
      for (std::size_t i = mu.size(); i-- > 0;) {
        theta.nodes.push_back(std::acos(mu.nodes[i]));
        theta.weights.push_back(mu.weights[i]);
      }
      return SpatialGrid(dimension, size, {std::move(r), std::move(theta), periodic_axis(counts[2])},
                         false);
    }
  }
  throw std::invalid_argument("unknown dimension");
}

SpatialGrid SpatialGrid::boundary(Dimension dimension, double size,
                                  std::array<std::size_t, 2> counts) {
  GridAxis wall{{size}, {1.0}};
  switch (dimension) {
    case Dimension::segment1D:
      return SpatialGrid(dimension, size, {std::move(wall)}, true);
    case Dimension::disk2D:
      wall.weights[0] = size;
      return SpatialGrid(dimension, size, {std::move(wall), periodic_axis(counts[0])}, true);
    case Dimension::sphere3D: {
      wall.weights[0] = size * size;
      GridAxis mu = gauss_legendre(counts[0], -1.0, 1.0);
      GridAxis theta;
      for (std::size_t i = mu.size(); i-- > 0;) {
        theta.nodes.push_back(std::acos(mu.nodes[i]));
        theta.weights.push_back(mu.weights[i]);
      }
      return SpatialGrid(dimension, size, {std::move(wall), std::move(theta), periodic_axis(counts[1])},
                         true);
    }
  }
  throw std::invalid_argument("unknown dimension");
}

std::array<std::size_t, 3> SpatialGrid::unflat(std::size_t i) const noexcept {
  const std::size_t i2 = i % shape_[2];
  i /= shape_[2];
  return {i / shape_[1], i % shape_[1], i2};
}

Point SpatialGrid::point(std::size_t i) const {
  const auto idx = unflat(i);
  Point p{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < axes_.size(); ++k) p[k] = axes_[k].nodes[idx[k]];
  return p;
}

double SpatialGrid::weight(std::size_t i) const {
  const auto idx = unflat(i);
  double w = 1.0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (!axes_[k].weights.empty()) w *= axes_[k].weights[idx[k]];
  }
  return w;
}

double SpatialGrid::measure() const {
  double total = 0.0;
  for (std::size_t i = 0; i < point_count(); ++i) total += weight(i);
  return total;
}

}  // namespace qpiston
