#pragma once

#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "thermovem/assembly.hpp"
#include "thermovem/problem.hpp"

namespace thermovem {

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Direct sparse LU. The symbolic analysis is kept while the sparsity
/// pattern stays the same.
class LinearSolver {
 public:
  /// Throws LinearSolveError if factorization fails or the relative residual
  /// exceeds `max_relative_residual`.
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs);

  double last_relative_residual() const { return last_residual_; }
  bool reused_pattern() const { return reused_; }

  double max_relative_residual = 1e-10;
  /// Steps of iterative refinement after the direct solve.
  int refinement_steps = 1;

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<int> pattern_outer_;
  std::vector<int> pattern_inner_;
  bool analyzed_ = false;
  bool reused_ = false;
  double last_residual_ = 0.0;
};

/// One-shot convenience wrapper.
Eigen::VectorXd linear_solve(const SparseSystem& system);

/// Solves the OSEEN system [[A, B^T, 0], [B, 0, m], [0, m^T, 0]].
///
/// The multiplier row is dense (one entry per cell) and ruins the fill of a
/// direct factorization, so the multiplier is eliminated in closed form and
/// one pressure DoF is pinned; the pressure is then shifted to zero mean.
/// The residual is checked against the full bordered system.
class OseenSolver {
 public:
  explicit OseenSolver(const DofMap& dofs) : dofs_(&dofs) {}

  Eigen::VectorXd solve(const SparseSystem& system);
  double last_relative_residual() const { return last_residual_; }

  double max_relative_residual = 1e-10;

 private:
  const DofMap* dofs_;
  LinearSolver inner_;
  double last_residual_ = 0.0;
};

struct FixedPointConfig {
  double tolerance = 1e-7;
  int max_iters = 50;
  bool skew_temperature_convection = true;
  /// Divergence-freedom is checked on every iterate against
  /// divergence_factor * (1 + |u|_1).
  double divergence_factor = 1e-10;
};

struct IterationRecord {
  int iteration = 0;
  double du = 0.0;
  double dtheta = 0.0;
  double divergence = 0.0;
  double velocity_seminorm = 0.0;
  double heat_residual = 0.0;
  double oseen_residual = 0.0;
};

struct SolverState {
  int iterations = 0;
  bool converged = false;
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  Eigen::VectorXd theta;
  std::vector<IterationRecord> history;
  int heat_size = 0;
  int oseen_size = 0;
  int viscosity_bound_violations = 0;

  /// True if every iterate passed the divergence check.
  bool divergence_free(double factor = 1e-10) const;
};

/// Linear fixed-point iteration: HEAT with the previous velocity, then OSEEN
/// with the new temperature, from (u, p) = (0, 0) and theta = 0.
/// Stops when max(relative l2 increments of u and theta) <= tolerance.
SolverState fixed_point_solve(const CoupledProblem& problem, const Discretization& disc, const FixedPointConfig& config,
                              std::ostream* log = nullptr);

}  // namespace thermovem
