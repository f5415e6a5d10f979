#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thermovem/assembly.hpp"
#include "thermovem/problem.hpp"
#include "thermovem/solver.hpp"

namespace thermovem {

/// Velocity and temperature errors are relative, pressure absolute. When the
/// exact norm is below 1e-14 the absolute value is reported and flagged.
/// Entries whose exact field is unknown are NaN.
struct ErrorReport {
  double err_u_h1 = 0.0;
  double err_u_l2 = 0.0;
  double err_theta_h1 = 0.0;
  double err_theta_l2 = 0.0;
  double err_p_l2 = 0.0;
  bool absolute_fallback = false;
  double h_measured = 0.0;
  int dofs_heat = 0;
  int dofs_oseen = 0;
  int n_it = 0;
};

ErrorReport compute_errors(const Discretization& disc, const SolverState& state, const ExactSolution& exact);

/// sqrt(sum_E ||div u_h||^2_E) from the exact divergence polynomials.
double divergence_norm(const Discretization& disc, const Eigen::VectorXd& u);

/// sqrt(sum_E ||Pi0_{k-1} grad u_h||^2_E).
double velocity_h1_seminorm(const Discretization& disc, const Eigen::VectorXd& u);

/// (min, max) of theta - reference over all temperature DoFs.
std::pair<double, double> extremal_dof_values(const Eigen::VectorXd& theta, double reference);

/// CSV `cell,x,y,u1,u2,abs_u,theta,p`, projected polynomials sampled at the
/// vertices and the centroid of every cell.
void export_fields(std::ostream& out, const Discretization& disc, const SolverState& state);
void export_fields(const std::string& path, const Discretization& disc, const SolverState& state);

struct ErrorRow {
  std::string family;
  int k = 2;
  int inv_h = 0;
  std::string status;  // "converged" or "not_converged"
  ErrorReport report;
};

/// Observed order log2(e_l / e_{l+1}) between consecutive rows of one family.
struct RateRow {
  std::string family;
  int inv_h = 0;
  double h_measured = 0.0;
  std::string status;
  double rate_u_h1 = 0.0, rate_u_l2 = 0.0, rate_theta_h1 = 0.0, rate_theta_l2 = 0.0, rate_p_l2 = 0.0;
};

/// Rows must be grouped by family with decreasing h; the first row of each
/// family gets NaN rates.
std::vector<RateRow> compute_rates(const std::vector<ErrorRow>& rows);

void write_errors_csv(std::ostream& out, const std::vector<ErrorRow>& rows);
void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rows);

/// %.17g formatting, with "nan" for NaN.
std::string format_double(double value);

}  // namespace thermovem
