#pragma once

// Product grids inside (or on the boundary of) the instantaneous well, with
// quadrature weights that already contain the volume element.

#include <array>
#include <cstddef>
#include <vector>

#include "qpiston/basis.hpp"

namespace qpiston {

struct GridAxis {
  std::vector<double> nodes;
  std::vector<double> weights;  // may be empty for grids not meant for quadrature

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [a, b].
GridAxis gauss_legendre(std::size_t n, double a, double b);

/// Midpoint rule: n cells of [a, b], nodes at the cell centres.
GridAxis midpoint_axis(std::size_t n, double a, double b);

/// n >= 2 equally spaced nodes including both ends, trapezoid weights.
GridAxis uniform_axis(std::size_t n, double a, double b);

/// n equally spaced nodes on the periodic interval [0, 2 pi).
GridAxis periodic_axis(std::size_t n);

class SpatialGrid {
 public:
  /// Quadrature grid for a domain of the given size.
  ///   1D: counts[0] midpoint cells.
  ///   2D: Gauss-Legendre in r (counts[0]) x periodic phi (counts[1]).
  ///   3D: Gauss-Legendre in r x Gauss-Legendre in cos(theta) x periodic phi.
  static SpatialGrid quadrature(Dimension dimension, double size, std::array<std::size_t, 3> counts);

  /// Product grid from explicit axes (x; r, phi; r, theta, phi). Weights are
  /// the product of the axis weights; empty axis weights mean unit weights.
  static SpatialGrid from_axes(Dimension dimension, double size, std::vector<GridAxis> axes);

  /// Points on the wall r = size: a single point (1D), periodic phi (2D), or
  /// Gauss-Legendre cos(theta) x periodic phi (3D). Weights carry the surface
  /// element, so they sum to the boundary measure.
  static SpatialGrid boundary(Dimension dimension, double size, std::array<std::size_t, 2> counts);

  Dimension dimension() const noexcept { return dimension_; }
  double size() const noexcept { return size_; }
  bool on_boundary() const noexcept { return boundary_; }

  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  const GridAxis& axis(std::size_t k) const { return axes_.at(k); }
  std::array<std::size_t, 3> shape() const noexcept { return shape_; }
  std::size_t point_count() const noexcept { return shape_[0] * shape_[1] * shape_[2]; }

  /// Row-major flat index; the last axis varies fastest.
  std::size_t flat(std::size_t i0, std::size_t i1 = 0, std::size_t i2 = 0) const noexcept {
    return (i0 * shape_[1] + i1) * shape_[2] + i2;
  }
  std::array<std::size_t, 3> unflat(std::size_t i) const noexcept;

  Point point(std::size_t i) const;
  double weight(std::size_t i) const;

  /// Sum of the weights.
  double measure() const;

 private:
  SpatialGrid(Dimension dimension, double size, std::vector<GridAxis> axes, bool boundary);

  Dimension dimension_;
  double size_;
  std::vector<GridAxis> axes_;
  std::array<std::size_t, 3> shape_{1, 1, 1};
  bool boundary_;
};

}  // namespace qpiston
