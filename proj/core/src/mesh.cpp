#include "thermovem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace thermovem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Orientation of c relative to segment ab: > 0 left, < 0 right.
double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

bool is_simple(const std::vector<Point>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::uint64_t pair_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
  }
  return "wall";
}

BoundaryTag boundary_tag_from_string(std::string_view name) {
  if (name == "wall") return BoundaryTag::wall;
  if (name == "inflow") return BoundaryTag::inflow;
  if (name == "outflow") return BoundaryTag::outflow;
  if (name == "interior") return BoundaryTag::interior;
  throw MeshError("unknown boundary tag '" + std::string(name) + "'");
}

ElementGeometry ElementGeometry::from_vertices(std::vector<Point> vertices) {
  ElementGeometry g;
  const int n = static_cast<int>(vertices.size());
  if (n < 3) throw MeshError("cell with fewer than 3 vertices");
  g.vertices = std::move(vertices);

  // shoelace area and centroid, relative to the first vertex to limit cancellation
  const Point origin = g.vertices[0];
  double a2 = 0.0;
  Point c = Point::Zero();
  for (int i = 0; i < n; ++i) {
    const Point p = g.vertices[static_cast<std::size_t>(i)] - origin;
    const Point q = g.vertices[static_cast<std::size_t>((i + 1) % n)] - origin;
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  g.area = 0.5 * a2;
  if (!(g.area > 0.0)) throw MeshError("cell is not counter-clockwise or has zero area");
  g.centroid = origin + c / (3.0 * a2);

  double diam2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      diam2 = std::max(diam2, (g.vertices[static_cast<std::size_t>(i)] - g.vertices[static_cast<std::size_t>(j)]).squaredNorm());
    }
  }
  g.diameter = std::sqrt(diam2);

  g.edge_lengths.resize(static_cast<std::size_t>(n));
  g.edge_normals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Point d = g.vertex(i + 1) - g.vertex(i);
    const double len = d.norm();
    if (!(len > 0.0)) throw MeshError("cell has a zero-length edge");
    g.edge_lengths[static_cast<std::size_t>(i)] = len;
    g.edge_normals[static_cast<std::size_t>(i)] = Point(d.y(), -d.x()) / len;
  }
  return g;
}

PolygonalMesh::PolygonalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                             const std::vector<EdgeLabel>& labels)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  const int nv = num_vertices();
  geometry_.reserve(cells_.size());
  cell_edges_.resize(cells_.size());

  std::map<std::uint64_t, int> edge_index;
  for (int c = 0; c < num_cells(); ++c) {
    const auto& loop = cells_[static_cast<std::size_t>(c)];
    std::vector<Point> poly;
    poly.reserve(loop.size());
    for (int v : loop) {
      if (v < 0 || v >= nv) throw MeshError("cell " + std::to_string(c) + " references a missing vertex");
      poly.push_back(vertices_[static_cast<std::size_t>(v)]);
    }
    if (!is_simple(poly)) throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
    try {
      geometry_.push_back(ElementGeometry::from_vertices(std::move(poly)));
    } catch (const MeshError& e) {
      throw MeshError("cell " + std::to_string(c) + ": " + e.what());
    }

    const int n = static_cast<int>(loop.size());
    auto& ce = cell_edges_[static_cast<std::size_t>(c)];
    ce.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int a = loop[static_cast<std::size_t>(i)];
      const int b = loop[static_cast<std::size_t>((i + 1) % n)];
      const auto key = pair_key(a, b);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        Edge e;
        e.vertices = {a, b};
        e.cells = {c, -1};
        edge_index.emplace(key, num_edges());
        ce[static_cast<std::size_t>(i)] = num_edges();
        edges_.push_back(e);
      } else {
        Edge& e = edges_[static_cast<std::size_t>(it->second)];
        if (e.cells[1] >= 0) throw MeshError("edge shared by more than two cells");
        if (e.vertices[0] != b || e.vertices[1] != a) {
          throw MeshError("inconsistent orientation between cells " + std::to_string(e.cells[0]) + " and " +
                          std::to_string(c));
        }
        e.cells[1] = c;
        ce[static_cast<std::size_t>(i)] = it->second;
      }
    }
  }

  boundary_vertex_.assign(static_cast<std::size_t>(nv), false);
  for (auto& e : edges_) {
    if (e.on_boundary()) {
      e.tag = BoundaryTag::wall;
      boundary_vertex_[static_cast<std::size_t>(e.vertices[0])] = true;
      boundary_vertex_[static_cast<std::size_t>(e.vertices[1])] = true;
    }
  }
  for (const auto& label : labels) {
    auto it = edge_index.find(pair_key(label.a, label.b));
    if (it == edge_index.end()) throw MeshError("edge label refers to a missing edge");
    Edge& e = edges_[static_cast<std::size_t>(it->second)];
    if (!e.on_boundary()) throw MeshError("edge label on an interior edge");
    if (label.tag == BoundaryTag::interior) throw MeshError("boundary edge labelled interior");
    e.tag = label.tag;
  }
}

bool PolygonalMesh::cell_edge_aligned(int cell, int local_edge) const {
  const auto& loop = cells_[static_cast<std::size_t>(cell)];
  const int e = cell_edges_[static_cast<std::size_t>(cell)][static_cast<std::size_t>(local_edge)];
  return edges_[static_cast<std::size_t>(e)].vertices[0] == loop[static_cast<std::size_t>(local_edge)];
}

int PolygonalMesh::num_interior_vertices() const {
  return static_cast<int>(std::count(boundary_vertex_.begin(), boundary_vertex_.end(), false));
}

int PolygonalMesh::num_interior_edges() const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.on_boundary(); }));
}

double PolygonalMesh::mesh_size() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

double PolygonalMesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

std::vector<EdgeLabel> PolygonalMesh::boundary_labels() const {
  std::vector<EdgeLabel> out;
  for (const auto& e : edges_) {
    if (e.on_boundary()) out.push_back({e.vertices[0], e.vertices[1], e.tag});
  }
  return out;
}

bool operator==(const PolygonalMesh& a, const PolygonalMesh& b) {
  if (a.vertices_.size() != b.vertices_.size() || a.cells_ != b.cells_) return false;
  for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
    if (a.vertices_[i].x() != b.vertices_[i].x() || a.vertices_[i].y() != b.vertices_[i].y()) return false;
  }
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    if (a.edges_[i].tag != b.edges_[i].tag) return false;
  }
  return true;
}

double centroid_kernel_radius(const ElementGeometry& g) {
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.num_vertices(); ++i) {
    // signed distance of the centroid to the supporting line, positive inside
    const double d = (g.vertex(i) - g.centroid).dot(g.edge_normals[static_cast<std::size_t>(i)]);
    r = std::min(r, d);
  }
  return r;
}

MeshQualityReport quality_report(const PolygonalMesh& mesh) {
  MeshQualityReport report{1.0, 1.0};
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.geometry(c);
    const double shortest = *std::min_element(g.edge_lengths.begin(), g.edge_lengths.end());
    report.rho_edge = std::min(report.rho_edge, shortest / g.diameter);
    report.rho_star_shape = std::min(report.rho_star_shape, std::max(0.0, centroid_kernel_radius(g)) / g.diameter);
  }
  return report;
}

}  // namespace thermovem
