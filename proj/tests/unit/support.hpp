#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "thermovem/mesh.hpp"
#include "thermovem/polybasis.hpp"
#include "thermovem/vem_spaces.hpp"

namespace thermovem::testing {

inline ElementGeometry unit_square() { return ElementGeometry::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

/// A mixed bag of cells: square, triangle, non-convex pentagon, small shifted hexagon.
inline std::vector<ElementGeometry> sample_cells() {
  std::vector<ElementGeometry> cells;
  cells.push_back(unit_square());
  cells.push_back(ElementGeometry::from_vertices({{0.1, 0.2}, {0.9, 0.1}, {0.5, 0.8}}));
  cells.push_back(ElementGeometry::from_vertices({{0, 0}, {2, 0}, {2, 1}, {1, 0.4}, {0, 1}}));
  std::vector<Point> hex;
  for (int i = 0; i < 6; ++i) hex.emplace_back(std::cos(i * M_PI / 3) * 0.3 + 2, std::sin(i * M_PI / 3) * 0.3 - 1);
  cells.push_back(ElementGeometry::from_vertices(hex));
  return cells;
}

/// Coefficients of a + b x + c y in the scaled monomial basis of `basis`.
inline Eigen::VectorXd affine(const MonomialBasis& basis, double a, double b, double c) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.size());
  coeffs(0) = a + b * basis.center().x() + c * basis.center().y();
  coeffs(1) = b * basis.scale();
  coeffs(2) = c * basis.scale();
  return coeffs;
}

/// Component-major coefficients of a vector field with the given components.
inline Eigen::VectorXd vector_poly(const Eigen::VectorXd& first, const Eigen::VectorXd& second) {
  Eigen::VectorXd v(first.size() + second.size());
  v << first, second;
  return v;
}

inline Eigen::VectorXd unit(int size, int index) { return Eigen::VectorXd::Unit(size, index); }

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace thermovem::testing
