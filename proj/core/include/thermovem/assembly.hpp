#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "thermovem/mesh.hpp"
#include "thermovem/problem.hpp"
#include "thermovem/vem_spaces.hpp"

namespace thermovem {

/// Global numbering. Boundary nodes are vertices followed by the k - 1 points
/// of every edge (along the edge's canonical direction). Temperature DoF of
/// node n is n; velocity DoFs of node n are 2n and 2n + 1; cell DoFs follow.
struct DofMap {
  int k = 2;
  int num_nodes = 0;
  int num_interior_vertices = 0;  // N_V
  int num_interior_edges = 0;     // N_E
  int num_cells = 0;              // N_P

  int velocity_size = 0;
  int temperature_size = 0;
  int pressure_size = 0;
  int pressure_per_cell = 0;

  std::vector<Point> node_positions;
  std::vector<std::vector<int>> velocity_cell_dofs;     // local -> global
  std::vector<std::vector<int>> temperature_cell_dofs;  // local -> global

  std::vector<int> velocity_free_index;     // -1 for Dirichlet DoFs
  std::vector<int> temperature_free_index;  // -1 for Dirichlet DoFs
  std::vector<int> free_velocity;           // reduced -> global
  std::vector<int> free_temperature;        // reduced -> global

  int pressure_dof(int cell, int a) const { return cell * pressure_per_cell + a; }
  int heat_system_size() const { return static_cast<int>(free_temperature.size()); }
  int oseen_system_size() const { return static_cast<int>(free_velocity.size()) + pressure_size + 1; }
  bool velocity_dirichlet(int dof) const { return velocity_free_index[static_cast<std::size_t>(dof)] < 0; }
  bool temperature_dirichlet(int dof) const { return temperature_free_index[static_cast<std::size_t>(dof)] < 0; }
};

/// N_V + (k-1) N_E + k(k-1)/2 N_P.
int expected_heat_size(int n_v, int n_e, int n_p, int k);
/// 2 N_V + 2(k-1) N_E + k(3k-1)/2 N_P + 1.
int expected_oseen_size(int n_v, int n_e, int n_p, int k);

/// Temperature is Dirichlet on nodes of boundary edges whose tag is listed;
/// velocity is Dirichlet on every boundary node.
DofMap build_dofmap(const PolygonalMesh& mesh, int k,
                    const std::vector<BoundaryTag>& temperature_dirichlet_tags = {BoundaryTag::wall, BoundaryTag::inflow,
                                                                                  BoundaryTag::outflow});

/// Mesh, projectors and numbering shared by all solves on one mesh.
struct Discretization {
  const PolygonalMesh* mesh = nullptr;
  int k = 2;
  std::vector<ElementProjectors> elements;
  DofMap dofs;

  static Discretization build(const PolygonalMesh& mesh, int k, const BoundaryData& boundary);
};

/// Full-length temperature vector holding the nodal interpolant of the
/// Dirichlet datum on constrained DoFs and zero elsewhere.
Eigen::VectorXd interpolate_dirichlet_temperature(const DofMap& dofs, const ScalarField& theta_d);

/// Full-length velocity vector with the boundary interpolant of g. The normal
/// component at interior edge points is corrected so that every boundary edge
/// carries the exact flux of g.
Eigen::VectorXd interpolate_dirichlet_velocity(const PolygonalMesh& mesh, const DofMap& dofs, const VectorField& g);

struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd solution;
};

Eigen::VectorXd gather(const std::vector<int>& local_to_global, const Eigen::VectorXd& global);

/// HEAT: a_T + c_T(u) over free temperature DoFs, Dirichlet values lifted.
SparseSystem assemble_heat(const Discretization& disc, const CoefficientFields& coefficients,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& theta_dirichlet, bool skew);

/// OSEEN: unknowns [free velocity, pressure, mean multiplier]. `w` empty
/// means no momentum convection (Stokes).
SparseSystem assemble_oseen(const Discretization& disc, const CoefficientFields& coefficients,
                            const Eigen::VectorXd& theta, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& velocity_dirichlet);

/// Full temperature vector from a HEAT solution.
Eigen::VectorXd expand_temperature(const DofMap& dofs, const Eigen::VectorXd& reduced, const Eigen::VectorXd& theta_dirichlet);

/// Full velocity vector and pressure from an OSEEN solution.
void expand_oseen(const DofMap& dofs, const Eigen::VectorXd& reduced, const Eigen::VectorXd& velocity_dirichlet,
                  Eigen::VectorXd& u, Eigen::VectorXd& p);

}  // namespace thermovem
