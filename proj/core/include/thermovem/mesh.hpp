#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace thermovem {

using Point = Eigen::Vector2d;

/// Raised for malformed meshes: non-simple cells, clockwise loops,
/// non-manifold edges, unreadable mesh files.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tag carried by boundary edges. Interior edges are always `interior`.
enum class BoundaryTag : std::uint8_t { interior = 0, wall = 1, inflow = 2, outflow = 3 };

std::string_view to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(std::string_view name);

struct Edge {
  std::array<int, 2> vertices{};       // canonical direction used for edge DoF numbering
  std::array<int, 2> cells{-1, -1};    // cells[1] == -1 on the boundary
  BoundaryTag tag = BoundaryTag::interior;

  bool on_boundary() const { return cells[1] < 0; }
};

struct EdgeLabel {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::wall;
};

/// Geometric data of one polygonal cell, in the cell's own CCW vertex order.
/// Local edge i joins vertices[i] and vertices[(i + 1) % n].
struct ElementGeometry {
  std::vector<Point> vertices;
  double area = 0.0;
  Point centroid = Point::Zero();
  double diameter = 0.0;
  std::vector<double> edge_lengths;
  std::vector<Point> edge_normals;  // outward unit normals

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  const Point& vertex(int i) const { return vertices[static_cast<std::size_t>(i % num_vertices())]; }

  static ElementGeometry from_vertices(std::vector<Point> vertices);
};

/// Immutable conforming polygonal mesh.
///
/// Cells are CCW vertex loops. Edges are derived at construction; boundary
/// edges default to `BoundaryTag::wall` unless a label is supplied.
class PolygonalMesh {
 public:
  PolygonalMesh() = default;
  PolygonalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                const std::vector<EdgeLabel>& labels = {});

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const ElementGeometry& geometry(int cell) const { return geometry_[static_cast<std::size_t>(cell)]; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Global edge index of local edge i of a cell.
  const std::vector<int>& cell_edges(int cell) const { return cell_edges_[static_cast<std::size_t>(cell)]; }
  /// True if local edge i of the cell runs along the global edge's canonical direction.
  bool cell_edge_aligned(int cell, int local_edge) const;

  bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)]; }
  bool is_boundary_edge(int e) const { return edges_[static_cast<std::size_t>(e)].on_boundary(); }

  int num_interior_vertices() const;
  int num_interior_edges() const;

  /// max diameter over cells
  double mesh_size() const;
  double total_area() const;

  /// Boundary edges carrying a tag, keyed by their vertex pair; used for file output.
  std::vector<EdgeLabel> boundary_labels() const;

  /// Bitwise comparison of coordinates and connectivity.
  friend bool operator==(const PolygonalMesh& a, const PolygonalMesh& b);

 private:
  std::vector<Point> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> cell_edges_;
  std::vector<ElementGeometry> geometry_;
  std::vector<bool> boundary_vertex_;
};

struct MeshQualityReport {
  double rho_star_shape = 0.0;
  double rho_edge = 0.0;
};

MeshQualityReport quality_report(const PolygonalMesh& mesh);

/// Radius of the largest centroid-centred ball from which the whole cell is
/// visible, i.e. the distance from the centroid to the nearest edge line.
/// Negative when the centroid lies outside the kernel of the polygon.
double centroid_kernel_radius(const ElementGeometry& geometry);

// ---------------------------------------------------------------------------
// Generators

/// n x n grid of the unit square; interior vertices jittered by at most
/// distortion / n using a seeded generator.
PolygonalMesh generate_quadrilateral(int n, double distortion = 0.0, std::uint64_t seed = 20230101);

/// n x n grid of the unit square, each square split along alternating diagonals.
PolygonalMesh generate_triangular(int n);

/// Clipped Voronoi tessellation of the unit square. lloyd_iters == 0 keeps
/// the random seeds, otherwise Lloyd relaxation runs until the seeds move less
/// than 1e-8 or the iteration budget is spent.
PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iters, std::uint64_t rng_seed);

/// Clipped Voronoi tessellation of the unit square for explicit seeds.
PolygonalMesh voronoi_from_seeds(const std::vector<Point>& seeds);

/// Triangulated channel (0,4)x(0,2) minus [2,4]x[0,1] with square side 2^-n,
/// inflow on x = 0, outflow on x = 4, wall elsewhere.
PolygonalMesh generate_test2_mesh(int n);

// ---------------------------------------------------------------------------
// I/O, "polymesh v1" text format

void write_mesh(std::ostream& out, const PolygonalMesh& mesh);
void write_mesh(const std::string& path, const PolygonalMesh& mesh);
PolygonalMesh read_mesh(std::istream& in);
PolygonalMesh read_mesh(const std::string& path);

}  // namespace thermovem
