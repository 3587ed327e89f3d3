#include "vem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace vem {

PolyMesh::PolyMesh(std::vector<Point2> vertices,
                   std::vector<std::vector<int>> loops)
    : vertices_(std::move(vertices)) {
  const int nv = static_cast<int>(vertices_.size());
  for (const Point2& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("non-finite vertex coordinate");
  }

  cells_.reserve(loops.size());
  std::map<std::pair<int, int>, int> edge_lookup;
  for (std::size_t c = 0; c < loops.size(); ++c) {
    Cell cell;
    cell.vertex_ids = std::move(loops[c]);
    const int nk = cell.n_edges();
    if (nk < 3) throw std::invalid_argument("cell with fewer than 3 vertices");
    Polygon poly(nk);
    for (int i = 0; i < nk; ++i) {
      const int v = cell.vertex_ids[i];
      if (v < 0 || v >= nv)
        throw std::invalid_argument("cell references missing vertex " +
                                    std::to_string(v));
      poly[i] = vertices_[v];
    }
    if (!is_simple_polygon(poly))
      throw std::invalid_argument("cell " + std::to_string(c) +
                                  " is not a simple polygon");
    cell.area = signed_area(poly);
    if (cell.area <= 0.0)
      throw std::invalid_argument("cell " + std::to_string(c) +
                                  " is not counter-clockwise");
    cell.centroid = polygon_centroid(poly);
    cell.diameter = polygon_diameter(poly);
    cell.edge_ids.resize(nk);
    for (int i = 0; i < nk; ++i) {
      int va = cell.vertex_ids[i];
      int vb = cell.vertex_ids[(i + 1) % nk];
      const std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
      auto it = edge_lookup.find(key);
      int eid;
      if (it == edge_lookup.end()) {
        eid = static_cast<int>(edges_.size());
        edge_lookup.emplace(key, eid);
        Edge e;
        e.a = key.first;
        e.b = key.second;
        e.cell_left = static_cast<int>(c);
        edges_.push_back(e);
      } else {
        eid = it->second;
        Edge& e = edges_[eid];
        if (e.cell_right >= 0)
          throw std::invalid_argument("edge shared by more than two cells");
        e.cell_right = static_cast<int>(c);
      }
      cell.edge_ids[i] = eid;
    }
    cells_.push_back(std::move(cell));
  }

  vertex_boundary_.assign(nv, false);
  for (const Edge& e : edges_) {
    if (e.is_boundary()) {
      vertex_boundary_[e.a] = true;
      vertex_boundary_[e.b] = true;
    } else {
      ++n_interior_edges_;
    }
  }
  for (int v = 0; v < nv; ++v)
    if (!vertex_boundary_[v]) ++n_interior_vertices_;
  for (const Cell& c : cells_) h_ = std::max(h_, c.diameter);
}

Polygon PolyMesh::cell_polygon(int c) const {
  const Cell& cell = cells_[c];
  Polygon poly(cell.vertex_ids.size());
  for (std::size_t i = 0; i < cell.vertex_ids.size(); ++i)
    poly[i] = vertices_[cell.vertex_ids[i]];
  return poly;
}

PolyMesh generate_quad_grid(int n) {
  if (n < 1) throw std::invalid_argument("quad grid needs n >= 1");
  std::vector<Point2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back({double(i) / n, double(j) / n});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      loops.push_back(
          {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  return PolyMesh(std::move(verts), std::move(loops));
}

PolyMesh generate_triangle_grid(int n) {
  if (n < 1) throw std::invalid_argument("triangle grid needs n >= 1");
  std::vector<Point2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back({double(i) / n, double(j) / n});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Deterministic mixed diagonal directions; a single direction
      // everywhere makes the grid translation-invariant and the discrete
      // errors superconverge past the expected order.
      std::uint32_t hsh = 0x9e3779b9u * (std::uint32_t(i) * 2654435761u ^
                                         (std::uint32_t(j) + 0x85ebca6bu));
      hsh ^= hsh >> 16;
      if (hsh & 1u) {
        loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        loops.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      } else {
        loops.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
        loops.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
    }
  }
  return PolyMesh(std::move(verts), std::move(loops));
}

namespace {

// Deterministic uniform doubles in [0,1) independent of the standard
// library's distribution implementation.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b9) {}
  double next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return double(z >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

Polygon voronoi_cell(const std::vector<Point2>& seeds, int i,
                     std::vector<int>& scratch) {
  const int n = static_cast<int>(seeds.size());
  const Point2 si = seeds[i];
  scratch.clear();
  for (int j = 0; j < n; ++j)
    if (j != i) scratch.push_back(j);
  auto closer = [&](int a, int b) {
    const double da = (seeds[a] - si).dot(seeds[a] - si);
    const double db = (seeds[b] - si).dot(seeds[b] - si);
    return da < db || (da == db && a < b);
  };
  // Nearby seeds decide the cell; sort a prefix first and fall back to the
  // full ordering only when the security-radius test never triggers.
  const int prefix = std::min<int>(48, static_cast<int>(scratch.size()));
  std::nth_element(scratch.begin(), scratch.begin() + prefix, scratch.end(),
                   closer);
  std::sort(scratch.begin(), scratch.begin() + prefix, closer);

  Polygon cell = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  bool done = false;
  auto process = [&](int begin, int end) {
    for (int idx = begin; idx < end; ++idx) {
      const int j = scratch[idx];
      const Point2 d = seeds[j] - si;
      const double dist = d.norm();
      // Planes farther than twice the current cell radius cannot cut it.
      double rmax = 0.0;
      for (const Point2& v : cell) rmax = std::max(rmax, (v - si).norm());
      if (0.5 * dist > rmax) {
        done = true;
        return;
      }
      const Point2 mid = si + 0.5 * d;
      cell = clip_half_plane(cell, mid, d);
      if (cell.size() < 3) {
        done = true;
        return;
      }
    }
  };
  process(0, prefix);
  if (!done && prefix < static_cast<int>(scratch.size())) {
    std::sort(scratch.begin() + prefix, scratch.end(), closer);
    process(prefix, static_cast<int>(scratch.size()));
  }
  return cell;
}

}  // namespace

PolyMesh generate_voronoi(int n_seeds, int lloyd_iters,
                          std::uint64_t rng_seed) {
  if (n_seeds < 1) throw std::invalid_argument("voronoi needs n_seeds >= 1");
  UniformRng rng(rng_seed);

  const int max_attempts = 5;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Point2> seeds(n_seeds);
    for (Point2& s : seeds) {
      s.x = rng.next();
      s.y = rng.next();
    }

    bool degenerate = false;
    std::vector<Polygon> cells(n_seeds);
    std::vector<int> scratch;
    for (int iter = 0; iter <= lloyd_iters && !degenerate; ++iter) {
      for (int i = 0; i < n_seeds; ++i) {
        cells[i] = voronoi_cell(seeds, i, scratch);
        if (cells[i].size() < 3 || signed_area(cells[i]) < 1e-14) {
          degenerate = true;
          break;
        }
      }
      if (degenerate || iter == lloyd_iters) break;
      for (int i = 0; i < n_seeds; ++i) seeds[i] = polygon_centroid(cells[i]);
    }
    if (degenerate) continue;

    // Merge near-identical corner coordinates into shared vertex ids.
    std::vector<Point2> verts;
    std::map<std::pair<long long, long long>, int> buckets;
    const double tol = 1e-9;
    auto vertex_id = [&](const Point2& p) {
      const long long kx = llround(p.x / tol);
      const long long ky = llround(p.y / tol);
      for (long long dx = -1; dx <= 1; ++dx) {
        for (long long dy = -1; dy <= 1; ++dy) {
          auto it = buckets.find({kx + dx, ky + dy});
          if (it != buckets.end() && (verts[it->second] - p).norm() < 2 * tol)
            return it->second;
        }
      }
      const int id = static_cast<int>(verts.size());
      verts.push_back(p);
      buckets.emplace(std::make_pair(kx, ky), id);
      return id;
    };

    std::vector<std::vector<int>> loops(n_seeds);
    bool collapsed = false;
    for (int i = 0; i < n_seeds; ++i) {
      std::vector<int>& loop = loops[i];
      for (const Point2& p : cells[i]) {
        const int id = vertex_id(p);
        if (loop.empty() || loop.back() != id) loop.push_back(id);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3) {
        collapsed = true;
        break;
      }
    }
    if (collapsed) continue;
    return PolyMesh(std::move(verts), std::move(loops));
  }
  throw std::runtime_error("voronoi generation failed: degenerate seeds after " +
                           std::to_string(max_attempts) + " attempts");
}

GeometryReport check_geometry(const PolyMesh& mesh) {
  GeometryReport rep;
  const int np = mesh.n_cells();
  rep.rho.resize(np);
  rep.vertex_ratio.resize(np);
  rep.kernel_area.resize(np);
  rep.min_rho = std::numeric_limits<double>::infinity();
  rep.min_vertex_ratio = std::numeric_limits<double>::infinity();
  for (int c = 0; c < np; ++c) {
    const Polygon poly = mesh.cell_polygon(c);
    if (!is_simple_polygon(poly))
      throw std::invalid_argument("invalid mesh: non-simple cell " +
                                  std::to_string(c));
    const double hk = mesh.cells()[c].diameter;
    const Polygon ker = polygon_kernel(poly);
    if (ker.empty()) {
      rep.rho[c] = 0.0;
      rep.kernel_area[c] = 0.0;
    } else {
      rep.rho[c] = chebyshev_center(ker).radius / hk;
      rep.kernel_area[c] = signed_area(ker);
    }
    rep.vertex_ratio[c] = min_vertex_distance(poly) / hk;
    rep.min_rho = std::min(rep.min_rho, rep.rho[c]);
    rep.min_vertex_ratio = std::min(rep.min_vertex_ratio, rep.vertex_ratio[c]);
  }
  return rep;
}

void write_mesh(const PolyMesh& mesh, std::ostream& os) {
  os << "vempoly 1\n";
  os << "vertices " << mesh.n_vertices_total() << "\n";
  char buf[64];
  for (const Point2& p : mesh.vertices()) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  os << "cells " << mesh.n_cells() << "\n";
  for (const Cell& c : mesh.cells()) {
    os << c.n_edges();
    for (int v : c.vertex_ids) os << ' ' << v;
    os << "\n";
  }
}

void write_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_mesh(mesh, os);
}

PolyMesh read_mesh(std::istream& is) {
  int lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw ParseError(lineno + 1, "unexpected end of file");
  };

  {
    std::istringstream ss(next_line());
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != "vempoly" || version != 1)
      throw ParseError(lineno, "expected header 'vempoly 1'");
  }
  int nv = 0;
  {
    std::istringstream ss(next_line());
    std::string kw;
    if (!(ss >> kw >> nv) || kw != "vertices" || nv < 0)
      throw ParseError(lineno, "expected 'vertices N'");
  }
  std::vector<Point2> verts(nv);
  for (int i = 0; i < nv; ++i) {
    std::istringstream ss(next_line());
    if (!(ss >> verts[i].x >> verts[i].y))
      throw ParseError(lineno, "expected vertex coordinates 'x y'");
  }
  int nc = 0;
  {
    std::istringstream ss(next_line());
    std::string kw;
    if (!(ss >> kw >> nc) || kw != "cells" || nc < 1)
      throw ParseError(lineno, "expected 'cells M'");
  }
  std::vector<std::vector<int>> loops(nc);
  for (int c = 0; c < nc; ++c) {
    std::istringstream ss(next_line());
    int nk = 0;
    if (!(ss >> nk) || nk < 3)
      throw ParseError(lineno, "expected cell vertex count >= 3");
    loops[c].resize(nk);
    for (int i = 0; i < nk; ++i) {
      if (!(ss >> loops[c][i]))
        throw ParseError(lineno, "expected vertex id");
      if (loops[c][i] < 0 || loops[c][i] >= nv)
        throw ParseError(lineno, "cell references missing vertex " +
                                     std::to_string(loops[c][i]));
    }
  }
  try {
    return PolyMesh(std::move(verts), std::move(loops));
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
}

PolyMesh read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_mesh(is);
}

}  // namespace vem
