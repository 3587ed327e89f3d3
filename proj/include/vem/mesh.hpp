#ifndef VEM_MESH_HPP
#define VEM_MESH_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

/// Thrown by the mesh reader; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Cell {
  std::vector<int> vertex_ids;  // counter-clockwise loop
  std::vector<int> edge_ids;    // edge_ids[i] joins vertex i to i+1
  double area = 0.0;
  double diameter = 0.0;
  Point2 centroid;

  int n_edges() const { return static_cast<int>(vertex_ids.size()); }
};

struct Edge {
  int a = -1;  // endpoint ids, a < b
  int b = -1;
  int cell_left = -1;
  int cell_right = -1;

  bool is_boundary() const { return cell_right < 0; }
};

/// A conforming polygonal decomposition of a two-dimensional domain.
/// Immutable after construction; cells, edges and counts are derived once.
class PolyMesh {
 public:
  /// Build from vertex coordinates and CCW cell loops; derives the edge
  /// table and validates orientation, simplicity and edge conformity.
  PolyMesh(std::vector<Point2> vertices, std::vector<std::vector<int>> loops);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_vertices_total() const { return static_cast<int>(vertices_.size()); }
  int n_edges_total() const { return static_cast<int>(edges_.size()); }
  int n_interior_vertices() const { return n_interior_vertices_; }
  int n_interior_edges() const { return n_interior_edges_; }
  bool vertex_on_boundary(int v) const { return vertex_boundary_[v]; }

  /// Max cell diameter.
  double h() const { return h_; }

  /// Vertex coordinates of one cell, in loop order.
  Polygon cell_polygon(int c) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  std::vector<bool> vertex_boundary_;
  int n_interior_vertices_ = 0;
  int n_interior_edges_ = 0;
  double h_ = 0.0;
};

/// Star-shape and vertex-spacing quality measures, per cell.
struct GeometryReport {
  std::vector<double> rho;                 // kernel inradius / h_K
  std::vector<double> vertex_ratio;        // min pairwise vertex dist / h_K
  std::vector<double> kernel_area;         // area of the cell kernel
  double min_rho = 0.0;
  double min_vertex_ratio = 0.0;
};

/// n x n grid of axis-aligned square cells on the unit square.
PolyMesh generate_quad_grid(int n);

/// Each grid square split along the lower-left to upper-right diagonal.
PolyMesh generate_triangle_grid(int n);

/// Clipped Voronoi diagram of random seeds in the unit square, relaxed
/// with the given number of Lloyd iterations. Deterministic per rng_seed.
PolyMesh generate_voronoi(int n_seeds, int lloyd_iters, std::uint64_t rng_seed);

GeometryReport check_geometry(const PolyMesh& mesh);

/// Plain-text format: "vempoly 1", vertex count + coordinates, cell count
/// + CCW loops. Edges and counts are derived on read, never stored.
void write_mesh(const PolyMesh& mesh, std::ostream& os);
void write_mesh(const PolyMesh& mesh, const std::string& path);
PolyMesh read_mesh(std::istream& is);
PolyMesh read_mesh(const std::string& path);

}  // namespace vem

#endif
