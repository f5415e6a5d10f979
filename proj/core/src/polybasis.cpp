#include "thermovem/polybasis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thermovem {

std::array<int, 2> monomial_exponents(int index) {
  int degree = 0;
  while (poly_dim(degree) <= index) ++degree;
  const int b = index - poly_dim(degree - 1);
  return {degree - b, b};
}

MonomialBasis::MonomialBasis(int degree, Point center, double scale)
    : degree_(degree), center_(std::move(center)), scale_(scale) {
  if (degree < 0) throw std::invalid_argument("MonomialBasis: negative degree");
  if (!(scale > 0.0)) throw std::invalid_argument("MonomialBasis: scale must be positive");
}

MonomialBasis MonomialBasis::for_element(const ElementGeometry& geometry, int degree) {
  return MonomialBasis(degree, geometry.centroid, geometry.diameter);
}

double MonomialBasis::value(int index, const Point& x) const {
  const auto [a, b] = monomial_exponents(index);
  const double s = (x.x() - center_.x()) / scale_;
  const double t = (x.y() - center_.y()) / scale_;
  return std::pow(s, a) * std::pow(t, b);
}

Eigen::VectorXd MonomialBasis::values(const Point& x) const { return values(x, degree_); }

Eigen::VectorXd MonomialBasis::values(const Point& x, int degree) const {
  Eigen::VectorXd out(poly_dim(degree));
  if (degree < 0) return out;
  const double s = (x.x() - center_.x()) / scale_;
  const double t = (x.y() - center_.y()) / scale_;
  out(0) = 1.0;
  for (int d = 1; d <= degree; ++d) {
    const int first = poly_dim(d - 1);
    const int prev = poly_dim(d - 2);
    // x^d y^0 from x^(d-1); the rest multiply the previous row by y
    out(first) = out(prev) * s;
    for (int b = 1; b <= d; ++b) out(first + b) = out(prev + b - 1) * t;
  }
  return out;
}

Eigen::MatrixXd MonomialBasis::derivative_matrix(int dir) const {
  const int n = size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = monomial_exponents(i);
    if (dir == 0 && a > 0) d(monomial_index(a - 1, b), i) = a / scale_;
    if (dir == 1 && b > 0) d(monomial_index(a, b - 1), i) = b / scale_;
  }
  return d;
}

PolyCoeffs MonomialBasis::monomial_grad(int index) const {
  const int m = poly_dim(degree_ - 1);
  PolyCoeffs g = PolyCoeffs::Zero(2 * m);
  const auto [a, b] = monomial_exponents(index);
  if (a > 0) g(monomial_index(a - 1, b)) = a / scale_;
  if (b > 0) g(m + monomial_index(a, b - 1)) = b / scale_;
  return g;
}

Eigen::MatrixXd MonomialBasis::laplacian_matrix() const {
  const int n = size();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  const double h2 = scale_ * scale_;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = monomial_exponents(i);
    if (a > 1) lap(monomial_index(a - 2, b), i) += a * (a - 1) / h2;
    if (b > 1) lap(monomial_index(a, b - 2), i) += b * (b - 1) / h2;
  }
  return lap;
}

namespace {

// Legendre P_n and its derivative on [-1, 1].
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  LineRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    // map from [-1, 1] to [0, 1], ascending
    const auto slot = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[slot] = 0.5 * (x + 1.0);
    rule.weights[slot] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

LineRule gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: n must be >= 2");
  const int order = n - 1;  // interior nodes are the roots of P'_order
  LineRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double end_weight = 1.0 / (order * (order + 1));
  rule.nodes.front() = 0.0;
  rule.nodes.back() = 1.0;
  rule.weights.front() = end_weight;
  rule.weights.back() = end_weight;
  for (int j = 1; j < order; ++j) {
    double x = -std::cos(std::numbers::pi * j / order);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(order, x);
      const double ddp = (2.0 * x * dp - order * (order + 1) * p) / (1.0 - x * x);
      const double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(order, x);
    (void)dp;
    rule.nodes[static_cast<std::size_t>(j)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(j)] = 1.0 / (order * (order + 1) * p * p);
  }
  return rule;
}

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int order) {
  // Duffy map (u, v) -> a + u (b - a) + u v (c - b), Jacobian 2|T| u
  const int n = std::max(1, (order + 3) / 2);
  const LineRule g = gauss_legendre(n);
  const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  QuadratureRule rule;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const double u = g.nodes[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double v = g.nodes[static_cast<std::size_t>(j)];
      rule.points.push_back(a + u * (b - a) + u * v * (c - b));
      rule.weights.push_back(g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] * u * twice_area);
    }
  }
  return rule;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& polygon) {
  std::vector<int> remaining(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) remaining[i] = static_cast<int>(i);
  auto cross = [](const Point& o, const Point& p, const Point& q) {
    return (p - o).x() * (q - o).y() - (p - o).y() * (q - o).x();
  };
  std::vector<std::array<int, 3>> triangles;
  while (remaining.size() > 3) {
    const std::size_t m = remaining.size();
    bool clipped = false;
    for (std::size_t i = 0; i < m && !clipped; ++i) {
      const int ia = remaining[(i + m - 1) % m];
      const int ib = remaining[i];
      const int ic = remaining[(i + 1) % m];
      const Point& pa = polygon[static_cast<std::size_t>(ia)];
      const Point& pb = polygon[static_cast<std::size_t>(ib)];
      const Point& pc = polygon[static_cast<std::size_t>(ic)];
      if (cross(pa, pb, pc) <= 0.0) continue;  // reflex or flat corner
      bool empty = true;
      for (int j : remaining) {
        if (j == ia || j == ib || j == ic) continue;
        const Point& q = polygon[static_cast<std::size_t>(j)];
        if (cross(pa, pb, q) >= 0.0 && cross(pb, pc, q) >= 0.0 && cross(pc, pa, q) >= 0.0) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      triangles.push_back({ia, ib, ic});
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) throw MeshError("ear clipping failed: polygon is not simple");
  }
  triangles.push_back({remaining[0], remaining[1], remaining[2]});
  return triangles;
}

QuadratureRule polygon_quadrature(const ElementGeometry& geometry, int order) {
  QuadratureRule rule;
  auto append = [&rule](const QuadratureRule& part) {
    rule.points.insert(rule.points.end(), part.points.begin(), part.points.end());
    rule.weights.insert(rule.weights.end(), part.weights.begin(), part.weights.end());
  };
  const int n = geometry.num_vertices();
  if (n == 3) {
    append(triangle_quadrature(geometry.vertex(0), geometry.vertex(1), geometry.vertex(2), order));
  } else if (centroid_kernel_radius(geometry) > 1e-12 * geometry.diameter) {
    for (int i = 0; i < n; ++i) {
      append(triangle_quadrature(geometry.centroid, geometry.vertex(i), geometry.vertex(i + 1), order));
    }
  } else {
    for (const auto& t : ear_clip(geometry.vertices)) {
      append(triangle_quadrature(geometry.vertex(t[0]), geometry.vertex(t[1]), geometry.vertex(t[2]), order));
    }
  }
  return rule;
}

Eigen::MatrixXd gram_matrix(const MonomialBasis& a, const MonomialBasis& b, const QuadratureRule& rule) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.size(), b.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    g.noalias() += rule.weights[q] * a.values(rule.points[q]) * b.values(rule.points[q]).transpose();
  }
  return g;
}

}  // namespace thermovem
