#include "vem/geometry.hpp"

#include <algorithm>
#include <limits>

namespace vem {

double signed_area(const Polygon& loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = loop[i];
    const Point2& q = loop[(i + 1) % n];
    a += p.cross(q);
  }
  return 0.5 * a;
}

Point2 polygon_centroid(const Polygon& loop) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = loop[i];
    const Point2& q = loop[(i + 1) % n];
    const double w = p.cross(q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  a *= 0.5;
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

double polygon_diameter(const Polygon& loop) {
  double d = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    for (std::size_t j = i + 1; j < loop.size(); ++j)
      d = std::max(d, (loop[i] - loop[j]).norm());
  return d;
}

double min_vertex_distance(const Polygon& loop) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i)
    for (std::size_t j = i + 1; j < loop.size(); ++j)
      d = std::min(d, (loop[i] - loop[j]).norm());
  return d;
}

namespace {

// Proper or touching intersection of open segments (a,b) and (c,d).
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                        const Point2& d) {
  const auto orient = [](const Point2& p, const Point2& q, const Point2& r) {
    return (q - p).cross(r - p);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return true;
  return false;
}

}  // namespace

bool is_simple_polygon(const Polygon& loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  const double scale = polygon_diameter(loop);
  for (std::size_t i = 0; i < n; ++i) {
    if ((loop[(i + 1) % n] - loop[i]).norm() < 1e-14 * scale) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint).
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j],
                             loop[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

Polygon clip_half_plane(const Polygon& poly, const Point2& p, const Point2& n,
                        bool snap_axis) {
  Polygon out;
  const std::size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 1);
  auto side = [&](const Point2& q) { return n.dot(q - p); };
  for (std::size_t i = 0; i < m; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % m];
    const double sa = side(a), sb = side(b);
    if (sa <= 0) out.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
      const double t = sa / (sa - sb);
      Point2 q = a + t * (b - a);
      if (snap_axis) {
        if (n.y == 0.0) q.x = p.x;
        if (n.x == 0.0) q.y = p.y;
      }
      out.push_back(q);
    }
  }
  return out;
}

Polygon polygon_kernel(const Polygon& loop) {
  // Start from the bounding box, then clip by every edge's half-plane.
  double xmin = loop[0].x, xmax = loop[0].x, ymin = loop[0].y, ymax = loop[0].y;
  for (const Point2& p : loop) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  Polygon ker = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n && !ker.empty(); ++i) {
    const Point2 a = loop[i];
    const Point2 b = loop[(i + 1) % n];
    const Point2 t = b - a;
    // Outward normal of a CCW edge.
    const Point2 nrm{t.y, -t.x};
    ker = clip_half_plane(ker, a, nrm);
  }
  if (!ker.empty() && std::abs(signed_area(ker)) < 1e-15) ker.clear();
  return ker;
}

ChebyshevDisk chebyshev_center(const Polygon& convex_loop) {
  // Constraints: for each edge with unit outward normal n_i through p_i,
  //   n_i . x + r <= n_i . p_i .
  // The optimum of max r is attained where three constraints are active.
  const std::size_t n = convex_loop.size();
  std::vector<Point2> nrm(n);
  std::vector<double> off(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = convex_loop[i];
    const Point2 b = convex_loop[(i + 1) % n];
    Point2 t = b - a;
    const double len = t.norm();
    nrm[i] = {t.y / len, -t.x / len};
    off[i] = nrm[i].dot(a);
  }
  ChebyshevDisk best;
  best.radius = -1.0;
  const double scale = polygon_diameter(convex_loop);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        // Solve [n_i 1; n_j 1; n_k 1] (x y r)' = (off_i off_j off_k)'.
        const double a11 = nrm[i].x, a12 = nrm[i].y;
        const double a21 = nrm[j].x, a22 = nrm[j].y;
        const double a31 = nrm[k].x, a32 = nrm[k].y;
        const double det = a11 * (a22 - a32) - a12 * (a21 - a31) +
                           (a21 * a32 - a22 * a31);
        if (std::abs(det) < 1e-12) continue;
        const double b1 = off[i], b2 = off[j], b3 = off[k];
        const double x =
            (b1 * (a22 - a32) - a12 * (b2 - b3) + (b2 * a32 - a22 * b3)) / det;
        const double y =
            (a11 * (b2 - b3) - b1 * (a21 - a31) + (a21 * b3 - b2 * a31)) / det;
        const double r =
            (a11 * (a22 * b3 - a32 * b2) - a12 * (a21 * b3 - a31 * b2) +
             b1 * (a21 * a32 - a22 * a31)) /
            det;
        if (r < 0) continue;
        // Feasibility with a small slack.
        bool ok = true;
        for (std::size_t m = 0; m < n; ++m) {
          if (nrm[m].x * x + nrm[m].y * y + r > off[m] + 1e-10 * scale) {
            ok = false;
            break;
          }
        }
        if (ok && r > best.radius) {
          best.radius = r;
          best.center = {x, y};
        }
      }
    }
  }
  if (best.radius < 0) best.radius = 0.0;
  return best;
}

}  // namespace vem
