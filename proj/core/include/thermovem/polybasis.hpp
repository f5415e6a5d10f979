#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "thermovem/mesh.hpp"

namespace thermovem {

/// dim P_n in two variables; zero for n < 0.
constexpr int poly_dim(int n) { return n < 0 ? 0 : (n + 1) * (n + 2) / 2; }

/// Graded lexicographic position of x^a y^b: (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
constexpr int monomial_index(int a, int b) { return poly_dim(a + b - 1) + b; }

std::array<int, 2> monomial_exponents(int index);

/// Coefficients of a polynomial (scalar, vector or tensor valued, components
/// stacked) over the scaled monomials of one element.
using PolyCoeffs = Eigen::VectorXd;

/// Scaled monomials m_a(x) = ((x - c) / h)^a on one element.
class MonomialBasis {
 public:
  MonomialBasis(int degree, Point center, double scale);
  static MonomialBasis for_element(const ElementGeometry& geometry, int degree);

  int degree() const { return degree_; }
  int size() const { return poly_dim(degree_); }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }

  double value(int index, const Point& x) const;
  Eigen::VectorXd values(const Point& x) const;
  Eigen::VectorXd values(const Point& x, int degree) const;

  /// Coefficient map of d/dx (dir = 0) or d/dy (dir = 1) acting on P_degree.
  /// Output stays in the P_degree ordering; the top-degree block is zero.
  Eigen::MatrixXd derivative_matrix(int dir) const;

  /// Exact gradient of one monomial, as [d/dx coeffs; d/dy coeffs] over P_{degree-1}.
  PolyCoeffs monomial_grad(int index) const;

  /// Coefficient map of the Laplacian, P_degree -> P_degree.
  Eigen::MatrixXd laplacian_matrix() const;

 private:
  int degree_;
  Point center_;
  double scale_;
};

/// One-dimensional rule on [0, 1].
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LineRule gauss_legendre(int n);
/// n >= 2 points including both end points.
LineRule gauss_lobatto(int n);

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// Collapsed Gauss rule on the triangle (a, b, c), exact on P_order.
QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int order);

/// Exact on P_order over the polygon. Cells are fanned from the centroid when
/// it sees every edge; otherwise they are ear-clipped.
QuadratureRule polygon_quadrature(const ElementGeometry& geometry, int order);

/// Ear-clipping triangulation of a simple CCW polygon, as vertex index triples.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& polygon);

/// G(i, j) = integral of m_i * m_j.
Eigen::MatrixXd gram_matrix(const MonomialBasis& a, const MonomialBasis& b, const QuadratureRule& rule);

}  // namespace thermovem
