#ifndef VEM_GEOMETRY_HPP
#define VEM_GEOMETRY_HPP

#include <cmath>
#include <vector>

namespace vem {

/// A point (or vector) in the plane.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2() = default;
  Point2(double x_, double y_) : x(x_), y(y_) {}

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  /// 2D cross product (z-component of the wedge).
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Point2 operator*(double s, const Point2& p) { return p * s; }

using Polygon = std::vector<Point2>;

/// Shoelace signed area; positive for counter-clockwise loops.
double signed_area(const Polygon& loop);

/// Area centroid of a simple polygon.
Point2 polygon_centroid(const Polygon& loop);

/// Maximum pairwise vertex distance.
double polygon_diameter(const Polygon& loop);

/// Smallest pairwise vertex distance.
double min_vertex_distance(const Polygon& loop);

/// True if no two non-adjacent edges intersect and no edge degenerates.
bool is_simple_polygon(const Polygon& loop);

/// Kernel of a simple CCW polygon (the set of points seeing the whole
/// polygon), obtained by intersecting the half-planes of all edges.
/// Returns an empty polygon when the cell is not star-shaped.
Polygon polygon_kernel(const Polygon& loop);

/// Center and radius of the largest inscribed circle of a convex polygon.
/// Solves the small Chebyshev-center LP by enumerating constraint triples.
struct ChebyshevDisk {
  Point2 center;
  double radius = 0.0;
};
ChebyshevDisk chebyshev_center(const Polygon& convex_loop);

/// Clip a convex CCW polygon against the half-plane n.(x - p) <= 0.
/// When snap_axis is set, intersection points are snapped exactly onto
/// axis-aligned clip lines (used for the unit-square Voronoi clipping).
Polygon clip_half_plane(const Polygon& poly, const Point2& p, const Point2& n,
                        bool snap_axis = false);

}  // namespace vem

#endif
