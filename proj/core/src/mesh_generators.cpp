#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "thermovem/mesh.hpp"

namespace thermovem {

namespace {

// Two triangles per grid square, diagonal alternating in a checkerboard.
void split_square(int v00, int v10, int v11, int v01, bool flip, std::vector<std::vector<int>>& cells) {
  if (!flip) {
    cells.push_back({v00, v10, v11});
    cells.push_back({v00, v11, v01});
  } else {
    cells.push_back({v00, v10, v01});
    cells.push_back({v10, v11, v01});
  }
}

}  // namespace

PolygonalMesh generate_quadrilateral(int n, double distortion, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_quadrilateral: n must be >= 1");
  if (!(distortion >= 0.0 && distortion < 0.5)) {
    throw std::invalid_argument("generate_quadrilateral: distortion must lie in [0, 0.5)");
  }
  const double step = 1.0 / n;
  const double amplitude = distortion / n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      Point p(i * step, j * step);
      if (i == n) p.x() = 1.0;
      if (j == n) p.y() = 1.0;
      if (i > 0 && i < n && j > 0 && j < n && amplitude > 0.0) {
        const double r = amplitude * unit(rng);
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        p += r * Point(std::cos(phi), std::sin(phi));
      }
      vertices.push_back(p);
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n * n));
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }
  return PolygonalMesh(std::move(vertices), std::move(cells));
}

PolygonalMesh generate_triangular(int n) {
  if (n < 1) throw std::invalid_argument("generate_triangular: n must be >= 1");
  const double step = 1.0 / n;
  std::vector<Point> vertices;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices.emplace_back(i == n ? 1.0 : i * step, j == n ? 1.0 : j * step);
  }
  std::vector<std::vector<int>> cells;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) split_square(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), (i + j) % 2 == 1, cells);
  }
  return PolygonalMesh(std::move(vertices), std::move(cells));
}

PolygonalMesh generate_test2_mesh(int n) {
  if (n < 0) throw std::invalid_argument("generate_test2_mesh: n must be >= 0");
  const int per_unit = 1 << n;
  const double step = 1.0 / per_unit;
  const int nx = 4 * per_unit;
  const int ny = 2 * per_unit;
  auto inside = [&](int i, int j) {
    // square [i, i+1] x [j, j+1] in grid units; the notch is x >= 2, y <= 1
    return !(i >= 2 * per_unit && j < per_unit);
  };

  std::vector<int> index(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
  std::vector<Point> vertices;
  auto vertex = [&](int i, int j) {
    auto& slot = index[static_cast<std::size_t>(j * (nx + 1) + i)];
    if (slot < 0) {
      slot = static_cast<int>(vertices.size());
      vertices.emplace_back(i * step, j * step);
    }
    return slot;
  };
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!inside(i, j)) continue;
      split_square(vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1), (i + j) % 2 == 1, cells);
    }
  }

  // Tag the inflow and outflow segments; everything else on the boundary is wall.
  const PolygonalMesh untagged(vertices, cells);
  std::vector<EdgeLabel> labels;
  for (const auto& e : untagged.edges()) {
    if (!e.on_boundary()) continue;
    const Point mid = 0.5 * (vertices[static_cast<std::size_t>(e.vertices[0])] + vertices[static_cast<std::size_t>(e.vertices[1])]);
    const bool vertical = vertices[static_cast<std::size_t>(e.vertices[0])].x() == vertices[static_cast<std::size_t>(e.vertices[1])].x();
    BoundaryTag tag = BoundaryTag::wall;
    if (vertical && mid.x() == 0.0) tag = BoundaryTag::inflow;
    if (vertical && mid.x() == 4.0 && mid.y() > 1.0) tag = BoundaryTag::outflow;
    labels.push_back({e.vertices[0], e.vertices[1], tag});
  }
  return PolygonalMesh(std::move(vertices), std::move(cells), labels);
}

}  // namespace thermovem
