#ifndef VEM_QUADRATURE_HPP
#define VEM_QUADRATURE_HPP

#include <vector>

#include "vem/geometry.hpp"

namespace vem {

/// Nodes and weights of a 2D rule together with its polynomial exactness.
struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(points.size()); }
  double weight_sum() const;

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int q = 0; q < size(); ++q) s += weights[q] * f(points[q]);
    return s;
  }
};

/// 1D rule on a reference interval.
struct Rule1d {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre on [-1,1]; exact for degree 2n-1.
Rule1d gauss_legendre(int n);

/// n-point Gauss-Lobatto on [-1,1] (endpoints included); exact for 2n-3.
Rule1d gauss_lobatto(int n);

/// n-point Gauss-Jacobi for weight (1-x) on [0,1]; exact for degree 2n-1
/// against that weight.
Rule1d gauss_jacobi_10(int n);

/// Conical-product rule on the reference triangle (0,0),(1,0),(0,1),
/// exact for total degree >= d.
QuadratureRule triangle_rule(int d);

/// Rule on a star-shaped polygon: fan sub-triangulation from the Chebyshev
/// center of the kernel, mapped triangle rules of degree d on each piece.
/// Throws when the polygon has an empty kernel (violates star-shapedness).
QuadratureRule polygon_quadrature(const Polygon& loop, int d);

/// Same, with a caller-provided star center (must see the whole polygon).
QuadratureRule polygon_quadrature(const Polygon& loop, int d,
                                  const Point2& star_center);

}  // namespace vem

#endif
