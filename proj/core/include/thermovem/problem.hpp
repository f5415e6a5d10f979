#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermovem/mesh.hpp"

namespace thermovem {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Eigen::Vector2d(const Point&)>;
using TensorField = std::function<Eigen::Matrix2d(const Point&)>;

/// Temperature-dependent viscosity nu(theta) with its declared bounds.
struct ViscosityLaw {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lower = 0.0;
  double upper = 0.0;
  double lipschitz = 0.0;

  static ViscosityLaw constant(double c);
  /// 2 + theta^2, with bounds stated for |theta| <= theta_max.
  static ViscosityLaw quadratic(double theta_max = 1.5);

  bool within_bounds(double nu) const { return nu >= lower && nu <= upper; }
};

struct CoefficientFields {
  ViscosityLaw viscosity = ViscosityLaw::constant(1.0);
  ScalarField conductivity = [](const Point&) { return 1.0; };
  double conductivity_lower = 1.0;
  double conductivity_upper = 1.0;
  VectorField force = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
  ScalarField heat_source = [](const Point&) { return 0.0; };
};

/// Velocity is prescribed on the whole boundary; temperature only on edges
/// whose tag is listed (homogeneous Neumann elsewhere).
struct BoundaryData {
  VectorField velocity = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
  ScalarField temperature = [](const Point&) { return 0.0; };
  std::vector<BoundaryTag> temperature_dirichlet_tags{BoundaryTag::wall, BoundaryTag::inflow, BoundaryTag::outflow};

  bool temperature_dirichlet_on(BoundaryTag tag) const;
};

/// Known parts of the exact solution; unknown fields stay empty.
struct ExactSolution {
  VectorField velocity;
  TensorField velocity_gradient;  // (i, j) = d_j u_i
  ScalarField pressure;
  ScalarField temperature;
  VectorField temperature_gradient;
};

struct CoupledProblem {
  std::string name;
  CoefficientFields coefficients;
  BoundaryData boundary;
  bool momentum_convection = true;
  bool skew_temperature_convection = true;
  std::optional<ExactSolution> exact;
};

/// Unit square, nu = 2 + theta^2, kappa = 1, loads manufactured from the
/// smooth exact solution.
CoupledProblem make_test1_problem();

/// Stokes flow through the notched channel carrying a passive temperature,
/// nu = 1e-2, kappa = 1e-6, theta = 1 on the inflow. Exact temperature is 1.
CoupledProblem make_test2_problem();

/// Strong residual pieces of the manufactured solution, exposed for validation.
Eigen::Vector2d test1_force(const Point& x);
double test1_heat_source(const Point& x);

}  // namespace thermovem
