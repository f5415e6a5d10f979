#include "thermovem/solver.hpp"

#include <cmath>
#include <iomanip>

#include "thermovem/postprocess.hpp"

namespace thermovem {

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) throw LinearSolveError("linear_solve: size mismatch");
  Eigen::SparseMatrix<double> a = matrix;
  a.makeCompressed();
  std::vector<int> outer(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
  std::vector<int> inner(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
  reused_ = analyzed_ && outer == pattern_outer_ && inner == pattern_inner_;
  if (!reused_) {
    lu_.analyzePattern(a);
    pattern_outer_ = std::move(outer);
    pattern_inner_ = std::move(inner);
    analyzed_ = true;
  }
  lu_.factorize(a);
  if (lu_.info() != Eigen::Success) throw LinearSolveError("linear_solve: factorization failed: " + lu_.lastErrorMessage());
  Eigen::VectorXd x = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !x.allFinite()) throw LinearSolveError("linear_solve: solve failed");
  for (int step = 0; step < refinement_steps; ++step) x += lu_.solve(rhs - a * x);
  const double b_norm = rhs.norm();
  const double r_norm = (a * x - rhs).norm();
  last_residual_ = b_norm > 0.0 ? r_norm / b_norm : r_norm;
  if (last_residual_ > max_relative_residual) {
    throw LinearSolveError("linear_solve: relative residual " + std::to_string(last_residual_) + " above threshold");
  }
  return x;
}

Eigen::VectorXd linear_solve(const SparseSystem& system) {
  LinearSolver solver;
  return solver.solve(system.matrix, system.rhs);
}

Eigen::VectorXd OseenSolver::solve(const SparseSystem& system) {
  const DofMap& d = *dofs_;
  const Eigen::Index nfv = static_cast<Eigen::Index>(d.free_velocity.size());
  const Eigen::Index n = system.matrix.rows();
  if (n != d.oseen_system_size() || system.rhs.size() != n) throw LinearSolveError("oseen solve: size mismatch");
  const Eigen::Index multiplier = n - 1;

  // constant pressure field, and the mean functional m from the last column
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(d.pressure_size);
  for (int c = 0; c < d.num_cells; ++c) ones(d.pressure_dof(c, 0)) = 1.0;
  const Eigen::VectorXd m = system.matrix.col(multiplier).segment(nfv, d.pressure_size);
  const double total = m.dot(ones);
  if (!(total > 0.0)) throw LinearSolveError("oseen solve: degenerate pressure mean functional");

  // summing the pressure rows kills B (zero flux of free velocity fields)
  const double lambda = system.rhs.segment(nfv, d.pressure_size).dot(ones) / total;

  const Eigen::Index pinned = nfv;  // constant mode of cell 0
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(system.matrix.nonZeros()));
  for (Eigen::Index col = 0; col < system.matrix.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
      if (it.row() == multiplier || it.col() == multiplier || it.row() == pinned || it.col() == pinned) continue;
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  triplets.emplace_back(static_cast<int>(pinned), static_cast<int>(pinned), 1.0);
  Eigen::SparseMatrix<double> reduced(multiplier, multiplier);
  reduced.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd rhs = system.rhs.head(multiplier);
  rhs.segment(nfv, d.pressure_size) -= lambda * m;
  rhs(pinned) = 0.0;

  inner_.max_relative_residual = max_relative_residual;
  const Eigen::VectorXd y = inner_.solve(reduced, rhs);
  Eigen::VectorXd x(n);
  x.head(multiplier) = y;
  x.segment(nfv, d.pressure_size) -= (m.dot(y.segment(nfv, d.pressure_size)) / total) * ones;
  x(multiplier) = lambda;

  const double b_norm = system.rhs.norm();
  const double r_norm = (system.matrix * x - system.rhs).norm();
  last_residual_ = b_norm > 0.0 ? r_norm / b_norm : r_norm;
  if (last_residual_ > max_relative_residual) {
    throw LinearSolveError("oseen solve: relative residual " + std::to_string(last_residual_) + " above threshold");
  }
  return x;
}

bool SolverState::divergence_free(double factor) const {
  for (const auto& record : history) {
    if (!(record.divergence <= factor * (1.0 + record.velocity_seminorm))) return false;
  }
  return true;
}

namespace {

double relative_increment(const Eigen::VectorXd& next, const Eigen::VectorXd& prev) {
  const double diff = (next - prev).norm();
  const double scale = next.norm();
  return scale > 1e-300 ? diff / scale : diff;
}

int count_viscosity_violations(const Discretization& disc, const ViscosityLaw& law, const Eigen::VectorXd& theta) {
  int violations = 0;
  for (std::size_t c = 0; c < disc.elements.size(); ++c) {
    const auto& element = disc.elements[c];
    const Eigen::VectorXd poly = element.temp.pi0 * gather(disc.dofs.temperature_cell_dofs[c], theta);
    for (const Point& x : element.quadrature.points) {
      if (!law.within_bounds(law.value(eval_poly(element.basis, poly, x)))) ++violations;
    }
  }
  return violations;
}

}  // namespace

SolverState fixed_point_solve(const CoupledProblem& problem, const Discretization& disc, const FixedPointConfig& config,
                              std::ostream* log) {
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("fixed_point_solve: tolerance must be positive");
  if (config.max_iters < 1) throw std::invalid_argument("fixed_point_solve: max_iters must be >= 1");
  const DofMap& d = disc.dofs;
  const Eigen::VectorXd theta_d = interpolate_dirichlet_temperature(d, problem.boundary.temperature);
  const Eigen::VectorXd u_d = interpolate_dirichlet_velocity(*disc.mesh, d, problem.boundary.velocity);

  SolverState state;
  state.u = Eigen::VectorXd::Zero(d.velocity_size);
  state.p = Eigen::VectorXd::Zero(d.pressure_size);
  state.theta = Eigen::VectorXd::Zero(d.temperature_size);
  state.heat_size = d.heat_system_size();
  state.oseen_size = d.oseen_system_size();

  LinearSolver heat_solver;
  OseenSolver oseen_solver(d);
  const Eigen::VectorXd no_convection;
  const bool skew = problem.skew_temperature_convection && config.skew_temperature_convection;
  for (int n = 1; n <= config.max_iters; ++n) {
    IterationRecord record;
    record.iteration = n;

    const SparseSystem heat = assemble_heat(disc, problem.coefficients, state.u, theta_d, skew);
    const Eigen::VectorXd theta_next = expand_temperature(d, heat_solver.solve(heat.matrix, heat.rhs), theta_d);
    record.heat_residual = heat_solver.last_relative_residual();
    state.viscosity_bound_violations += count_viscosity_violations(disc, problem.coefficients.viscosity, theta_next);

    const SparseSystem oseen = assemble_oseen(disc, problem.coefficients, theta_next,
                                              problem.momentum_convection ? state.u : no_convection, u_d);
    Eigen::VectorXd u_next, p_next;
    expand_oseen(d, oseen_solver.solve(oseen), u_d, u_next, p_next);
    record.oseen_residual = oseen_solver.last_relative_residual();

    record.du = relative_increment(u_next, state.u);
    record.dtheta = relative_increment(theta_next, state.theta);
    record.divergence = divergence_norm(disc, u_next);
    record.velocity_seminorm = velocity_h1_seminorm(disc, u_next);
    state.u = std::move(u_next);
    state.p = std::move(p_next);
    state.theta = theta_next;
    state.history.push_back(record);
    state.iterations = n;
    if (log != nullptr) {
      *log << "iter " << n << ' ' << format_double(record.du) << ' ' << format_double(record.dtheta) << '\n';
    }
    if (std::max(record.du, record.dtheta) <= config.tolerance) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace thermovem
