// Clipped Voronoi tessellation of the unit square with optional Lloyd relaxation.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "thermovem/mesh.hpp"

namespace thermovem {

namespace {

using Polygon = std::vector<Point>;

// Keeps the part of the polygon where (x - anchor) . normal <= 0.
Polygon clip_half_plane(const Polygon& poly, const Point& anchor, const Point& normal) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const double da = (a - anchor).dot(normal);
    const double db = (b - anchor).dot(normal);
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

double polygon_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& u = p[i];
    const Point& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - u.y() * v.x();
  }
  return 0.5 * a;
}

Point polygon_centroid(const Polygon& p) {
  double a2 = 0.0;
  Point c = Point::Zero();
  const Point o = p.front();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point u = p[i] - o;
    const Point v = p[(i + 1) % p.size()] - o;
    const double w = u.x() * v.y() - u.y() * v.x();
    a2 += w;
    c += w * (u + v);
  }
  return o + c / (3.0 * a2);
}

class SeedBuckets {
 public:
  explicit SeedBuckets(const std::vector<Point>& seeds)
      : seeds_(seeds), m_(std::max(1, static_cast<int>(std::sqrt(static_cast<double>(seeds.size()))))) {
    buckets_.resize(static_cast<std::size_t>(m_ * m_));
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
      auto [bi, bj] = bucket_of(seeds[static_cast<std::size_t>(i)]);
      buckets_[static_cast<std::size_t>(bj * m_ + bi)].push_back(i);
    }
  }

  std::pair<int, int> bucket_of(const Point& p) const {
    auto clampi = [this](double t) { return std::clamp(static_cast<int>(t * m_), 0, m_ - 1); };
    return {clampi(p.x()), clampi(p.y())};
  }

  int size() const { return m_; }
  double bucket_width() const { return 1.0 / m_; }
  const std::vector<int>& bucket(int bi, int bj) const { return buckets_[static_cast<std::size_t>(bj * m_ + bi)]; }

 private:
  const std::vector<Point>& seeds_;
  int m_;
  std::vector<std::vector<int>> buckets_;
};

Polygon voronoi_cell(int i, const std::vector<Point>& seeds, const SeedBuckets& grid) {
  Polygon cell{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  const Point& s = seeds[static_cast<std::size_t>(i)];
  auto [bi, bj] = grid.bucket_of(s);
  for (int ring = 0; ring <= grid.size(); ++ring) {
    double radius = 0.0;
    for (const auto& v : cell) radius = std::max(radius, (v - s).norm());
    if ((ring - 1) * grid.bucket_width() > 2.0 * radius) break;
    for (int dj = -ring; dj <= ring; ++dj) {
      for (int di = -ring; di <= ring; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
        const int ci = bi + di;
        const int cj = bj + dj;
        if (ci < 0 || cj < 0 || ci >= grid.size() || cj >= grid.size()) continue;
        for (int j : grid.bucket(ci, cj)) {
          if (j == i) continue;
          const Point& t = seeds[static_cast<std::size_t>(j)];
          const Point normal = t - s;
          if (normal.squaredNorm() == 0.0) throw MeshError("coincident Voronoi seeds");
          cell = clip_half_plane(cell, 0.5 * (s + t), normal);
        }
      }
    }
  }
  if (cell.size() < 3 || !(polygon_area(cell) > 0.0)) throw MeshError("degenerate Voronoi cell");
  return cell;
}

std::vector<Polygon> voronoi_cells(const std::vector<Point>& seeds) {
  const SeedBuckets grid(seeds);
  std::vector<Polygon> cells;
  cells.reserve(seeds.size());
  for (int i = 0; i < static_cast<int>(seeds.size()); ++i) cells.push_back(voronoi_cell(i, seeds, grid));
  return cells;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

// 0 interior, 1 on one side of the square, 2 at a corner
int boundary_rank(const Point& p) {
  const int on_x = (p.x() == 0.0 || p.x() == 1.0) ? 1 : 0;
  const int on_y = (p.y() == 0.0 || p.y() == 1.0) ? 1 : 0;
  return on_x + on_y;
}

// Merges coincident cell corners, collapses edges shorter than min_edge and
// builds the conforming mesh.
PolygonalMesh mesh_from_cells(const std::vector<Polygon>& cells, double min_edge) {
  std::vector<Point> raw;
  std::vector<std::vector<int>> loops;
  for (const auto& cell : cells) {
    std::vector<int> loop;
    for (const auto& p : cell) {
      loop.push_back(static_cast<int>(raw.size()));
      raw.push_back(p);
    }
    loops.push_back(std::move(loop));
  }

  DisjointSets sets(raw.size());
  const double tol = 1e-10;
  {
    std::unordered_map<std::int64_t, std::vector<int>> hash;
    auto key = [](std::int64_t a, std::int64_t b) { return a * 4000037 + b; };
    for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
      const auto gx = static_cast<std::int64_t>(std::floor(raw[static_cast<std::size_t>(i)].x() / tol));
      const auto gy = static_cast<std::int64_t>(std::floor(raw[static_cast<std::size_t>(i)].y() / tol));
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = hash.find(key(gx + dx, gy + dy));
          if (it == hash.end()) continue;
          for (int j : it->second) {
            if ((raw[static_cast<std::size_t>(i)] - raw[static_cast<std::size_t>(j)]).norm() <= tol) sets.unite(i, j);
          }
        }
      }
      hash[key(gx, gy)].push_back(i);
    }
  }
  for (const auto& loop : loops) {
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const int a = loop[k];
      const int b = loop[(k + 1) % loop.size()];
      if ((raw[static_cast<std::size_t>(a)] - raw[static_cast<std::size_t>(b)]).norm() < min_edge) sets.unite(a, b);
    }
  }

  // representative position: corners win, then points on one side, then the average
  std::vector<int> cluster_of(raw.size());
  std::unordered_map<int, int> cluster_index;
  std::vector<std::vector<int>> members;
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    const int root = sets.find(i);
    auto [it, inserted] = cluster_index.emplace(root, static_cast<int>(members.size()));
    if (inserted) members.emplace_back();
    members[static_cast<std::size_t>(it->second)].push_back(i);
    cluster_of[static_cast<std::size_t>(i)] = it->second;
  }
  std::vector<Point> vertices;
  vertices.reserve(members.size());
  for (const auto& group : members) {
    int best_rank = -1;
    for (int i : group) best_rank = std::max(best_rank, boundary_rank(raw[static_cast<std::size_t>(i)]));
    Point sum = Point::Zero();
    int count = 0;
    for (int i : group) {
      if (boundary_rank(raw[static_cast<std::size_t>(i)]) == best_rank) {
        sum += raw[static_cast<std::size_t>(i)];
        ++count;
      }
    }
    Point p = sum / count;
    if (best_rank == 1) {
      // keep the averaged point on the side it came from
      for (int i : group) {
        if (boundary_rank(raw[static_cast<std::size_t>(i)]) == 1) {
          const Point& q = raw[static_cast<std::size_t>(i)];
          if (q.x() == 0.0 || q.x() == 1.0) p.x() = q.x();
          if (q.y() == 0.0 || q.y() == 1.0) p.y() = q.y();
          break;
        }
      }
    }
    vertices.push_back(p);
  }

  std::vector<std::vector<int>> mesh_cells;
  for (const auto& loop : loops) {
    std::vector<int> merged;
    for (int i : loop) {
      const int v = cluster_of[static_cast<std::size_t>(i)];
      if (merged.empty() || merged.back() != v) merged.push_back(v);
    }
    while (merged.size() > 1 && merged.front() == merged.back()) merged.pop_back();
    if (merged.size() >= 3) mesh_cells.push_back(std::move(merged));
  }

  // Drop unreferenced vertices so the numbering stays compact.
  std::vector<int> renumber(vertices.size(), -1);
  std::vector<Point> used;
  for (auto& cell : mesh_cells) {
    for (int& v : cell) {
      auto& slot = renumber[static_cast<std::size_t>(v)];
      if (slot < 0) {
        slot = static_cast<int>(used.size());
        used.push_back(vertices[static_cast<std::size_t>(v)]);
      }
      v = slot;
    }
  }
  PolygonalMesh mesh(std::move(used), std::move(mesh_cells));

  // Every boundary edge must lie on the square; anything else is a hanging node.
  double boundary_length = 0.0;
  for (const auto& e : mesh.edges()) {
    if (!e.on_boundary()) continue;
    const Point& a = mesh.vertices()[static_cast<std::size_t>(e.vertices[0])];
    const Point& b = mesh.vertices()[static_cast<std::size_t>(e.vertices[1])];
    const bool on_side = (a.x() == b.x() && (a.x() == 0.0 || a.x() == 1.0)) ||
                         (a.y() == b.y() && (a.y() == 0.0 || a.y() == 1.0));
    if (!on_side) throw MeshError("non-conforming Voronoi mesh");
    boundary_length += (a - b).norm();
  }
  if (std::abs(boundary_length - 4.0) > 1e-12) throw MeshError("Voronoi mesh does not cover the square");
  return mesh;
}

double collapse_threshold(std::size_t n_seeds) { return 1e-3 / std::sqrt(static_cast<double>(n_seeds)); }

}  // namespace

PolygonalMesh voronoi_from_seeds(const std::vector<Point>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("voronoi_from_seeds: no seeds");
  for (const auto& s : seeds) {
    if (!(s.x() > 0.0 && s.x() < 1.0 && s.y() > 0.0 && s.y() < 1.0)) {
      throw std::invalid_argument("voronoi_from_seeds: seeds must lie inside the unit square");
    }
  }
  return mesh_from_cells(voronoi_cells(seeds), collapse_threshold(seeds.size()));
}

PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iters, std::uint64_t rng_seed) {
  if (n_seeds < 1) throw std::invalid_argument("generate_voronoi: n_seeds must be >= 1");
  if (lloyd_iters < 0) throw std::invalid_argument("generate_voronoi: lloyd_iters must be >= 0");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  constexpr int max_attempts = 8;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Point> seeds(static_cast<std::size_t>(n_seeds));
    for (auto& s : seeds) s = Point(unit(rng), unit(rng));
    try {
      for (int it = 0; it < lloyd_iters; ++it) {
        const auto cells = voronoi_cells(seeds);
        double motion = 0.0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          const Point c = polygon_centroid(cells[i]);
          motion = std::max(motion, (c - seeds[i]).norm());
          seeds[i] = c;
        }
        if (motion < 1e-8) break;
      }
      return voronoi_from_seeds(seeds);
    } catch (const MeshError& e) {
      std::clog << "generate_voronoi: attempt " << attempt + 1 << " rejected (" << e.what()
                << "), regenerating seeds\n";
    }
  }
  throw MeshError("generate_voronoi: could not build a valid tessellation");
}

}  // namespace thermovem
