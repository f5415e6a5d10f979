#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "thermovem/mesh.hpp"
#include "thermovem/polybasis.hpp"

namespace thermovem {

/// Raised when an element's local systems are singular (degenerate geometry).
class ElementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters in (0, 1) of the k - 1 interior Gauss-Lobatto points of an edge.
std::vector<double> edge_point_parameters(int k);

/// Boundary nodes of a cell: vertices first, then the k - 1 points of each
/// local edge i (from vertex i towards vertex i + 1).
std::vector<Point> boundary_nodes(const ElementGeometry& geometry, int k);

/// Local DoF ordering of the temperature space:
/// [vertex values][edge point values][moments (1/|E|) int s m_a, |a| <= k - 2].
struct TemperatureDofLayout {
  int k = 2;
  int num_vertices = 0;

  int boundary_size() const { return num_vertices * k; }
  int num_moments() const { return poly_dim(k - 2); }
  int size() const { return boundary_size() + num_moments(); }
  int node(int n) const { return n; }
  int moment(int a) const { return boundary_size() + a; }
};

/// Local DoF ordering of the velocity space:
/// [node values, x/y interleaved][(1/|E|) int v . m_perp m_a, |a| <= k - 3]
/// [(h/|E|) int div v m_a, 0 < |a| <= k - 1].
struct VelocityDofLayout {
  int k = 2;
  int num_vertices = 0;

  int boundary_size() const { return 2 * num_vertices * k; }
  int num_curl_moments() const { return poly_dim(k - 3); }
  int num_div_moments() const { return poly_dim(k - 1) - 1; }
  int size() const { return boundary_size() + num_curl_moments() + num_div_moments(); }
  int node(int n, int component) const { return 2 * n + component; }
  int curl_moment(int a) const { return boundary_size() + a; }
  int div_moment(int a) const { return boundary_size() + num_curl_moments() + a - 1; }
};

struct TemperatureProjectors {
  TemperatureDofLayout layout;
  Eigen::MatrixXd pi_nabla;  // dim P_k x ndofs
  Eigen::MatrixXd pi0;       // dim P_k x ndofs
  Eigen::MatrixXd pi0_grad;  // 2 dim P_{k-1} x ndofs, [d/dx; d/dy]
  Eigen::MatrixXd dofs;      // ndofs x dim P_k, DoFs of each monomial
};

/// Vector polynomials are stored component-major: [v1 coeffs; v2 coeffs].
/// Tensors G_ij = d_j v_i are stored as blocks 11, 12, 21, 22.
struct VelocityProjectors {
  VelocityDofLayout layout;
  Eigen::MatrixXd pi_nabla;  // 2 dim P_k x ndofs
  Eigen::MatrixXd pi0;       // 2 dim P_k x ndofs
  Eigen::MatrixXd pi0_grad;  // 4 dim P_{k-1} x ndofs
  Eigen::MatrixXd pi0_eps;   // 4 dim P_{k-1} x ndofs
  Eigen::MatrixXd div;       // dim P_{k-1} x ndofs
  Eigen::MatrixXd dofs;      // ndofs x 2 dim P_k
};

/// Everything the forms need on one cell.
struct ElementProjectors {
  int k = 2;
  ElementGeometry geometry;
  MonomialBasis basis{0, Point::Zero(), 1.0};  // degree k
  QuadratureRule quadrature;                   // exact on P_{max(2k+2, 3k)}
  Eigen::MatrixXd mass;                        // Gram of P_k
  TemperatureProjectors temp;
  VelocityProjectors vel;
};

/// Quadrature order used for all element integrals.
int element_quadrature_order(int k);

TemperatureProjectors temp_projectors(const ElementGeometry& geometry, const QuadratureRule& quadrature, int k);
VelocityProjectors velocity_projectors(const ElementGeometry& geometry, const QuadratureRule& quadrature, int k);
ElementProjectors build_element_projectors(const ElementGeometry& geometry, int k);

/// Projectors for every cell of the mesh, in cell order.
std::vector<ElementProjectors> build_all_projectors(const PolygonalMesh& mesh, int k);

/// Evaluates a polynomial given by coefficients over `basis` (any prefix length).
double eval_poly(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x);

}  // namespace thermovem
