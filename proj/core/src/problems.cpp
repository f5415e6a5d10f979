#include <algorithm>
#include <cmath>
#include <numbers>

#include "thermovem/problem.hpp"

namespace thermovem {

ViscosityLaw ViscosityLaw::constant(double c) {
  ViscosityLaw law;
  law.name = "constant:" + std::to_string(c);
  law.value = [c](double) { return c; };
  law.derivative = [](double) { return 0.0; };
  law.lower = c;
  law.upper = c;
  law.lipschitz = 0.0;
  return law;
}

ViscosityLaw ViscosityLaw::quadratic(double theta_max) {
  ViscosityLaw law;
  law.name = "quadratic";
  law.value = [](double t) { return 2.0 + t * t; };
  law.derivative = [](double t) { return 2.0 * t; };
  law.lower = 2.0;
  law.upper = 2.0 + theta_max * theta_max;
  law.lipschitz = 2.0 * theta_max;
  return law;
}

bool BoundaryData::temperature_dirichlet_on(BoundaryTag tag) const {
  return std::find(temperature_dirichlet_tags.begin(), temperature_dirichlet_tags.end(), tag) !=
         temperature_dirichlet_tags.end();
}

namespace {

constexpr double pi = std::numbers::pi;

Eigen::Vector2d u_ex(const Point& p) {
  const double x = p.x(), y = p.y(), ex = std::exp(x);
  return {ex * (std::sin(y) + y * std::cos(y) - x * std::sin(y)), ex * (-x * std::cos(y) - y * std::sin(y) - std::cos(y))};
}

Eigen::Matrix2d grad_u_ex(const Point& p) {
  const double x = p.x(), y = p.y(), ex = std::exp(x), s = std::sin(y), c = std::cos(y);
  Eigen::Matrix2d g;
  g(0, 0) = -(x * s - y * c) * ex;
  g(0, 1) = -(x * c + y * s - 2.0 * c) * ex;
  g(1, 0) = -(x * c + y * s + 2.0 * c) * ex;
  g(1, 1) = (x * s - y * c) * ex;
  return g;
}

double p_ex(const Point& p) { return std::sin(pi * p.x()) * std::cos(4.0 * pi * p.y()); }

Eigen::Vector2d grad_p_ex(const Point& p) {
  return {pi * std::cos(pi * p.x()) * std::cos(4.0 * pi * p.y()), -4.0 * pi * std::sin(pi * p.x()) * std::sin(4.0 * pi * p.y())};
}

double theta_ex(const Point& p) { return std::sin(4.0 * pi * p.x()) * std::sin(pi * p.y()); }

Eigen::Vector2d grad_theta_ex(const Point& p) {
  return {4.0 * pi * std::cos(4.0 * pi * p.x()) * std::sin(pi * p.y()), pi * std::sin(4.0 * pi * p.x()) * std::cos(pi * p.y())};
}

}  // namespace

Eigen::Vector2d test1_force(const Point& x) {
  // -div(nu(theta) eps(u)) + (grad u) u - grad p, with div u = 0 so that
  // div eps(u) = lap(u) / 2
  const double theta = theta_ex(x);
  const double nu = 2.0 + theta * theta;
  const double dnu = 2.0 * theta;
  const Eigen::Matrix2d g = grad_u_ex(x);
  const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
  const double ex = std::exp(x.x());
  const Eigen::Vector2d lap(-4.0 * ex * std::sin(x.y()), -4.0 * ex * std::cos(x.y()));
  const Eigen::Vector2d div_nu_eps = dnu * (eps * grad_theta_ex(x)) + nu * 0.5 * lap;
  return -div_nu_eps + g * u_ex(x) - grad_p_ex(x);
}

double test1_heat_source(const Point& x) {
  return 17.0 * pi * pi * theta_ex(x) + u_ex(x).dot(grad_theta_ex(x));
}

CoupledProblem make_test1_problem() {
  CoupledProblem problem;
  problem.name = "test1";
  problem.coefficients.viscosity = ViscosityLaw::quadratic();
  problem.coefficients.force = test1_force;
  problem.coefficients.heat_source = test1_heat_source;
  problem.boundary.velocity = u_ex;
  problem.boundary.temperature = theta_ex;
  problem.exact = ExactSolution{u_ex, grad_u_ex, p_ex, theta_ex, grad_theta_ex};
  return problem;
}

CoupledProblem make_test2_problem() {
  CoupledProblem problem;
  problem.name = "test2";
  problem.coefficients.viscosity = ViscosityLaw::constant(1e-2);
  problem.coefficients.conductivity = [](const Point&) { return 1e-6; };
  problem.coefficients.conductivity_lower = 1e-6;
  problem.coefficients.conductivity_upper = 1e-6;
  problem.boundary.velocity = [](const Point& p) -> Eigen::Vector2d {
    const double y = p.y();
    if (p.x() <= 1e-12) return {0.5 * y * (2.0 - y), 0.0};
    if (p.x() >= 4.0 - 1e-12 && y >= 1.0) return {4.0 * (y - 1.0) * (2.0 - y), 0.0};
    return Eigen::Vector2d::Zero();
  };
  problem.boundary.temperature = [](const Point&) { return 1.0; };
  problem.boundary.temperature_dirichlet_tags = {BoundaryTag::inflow};
  problem.momentum_convection = false;
  problem.skew_temperature_convection = false;
  ExactSolution exact;
  exact.temperature = [](const Point&) { return 1.0; };
  exact.temperature_gradient = [](const Point&) -> Eigen::Vector2d { return Eigen::Vector2d::Zero(); };
  problem.exact = exact;
  return problem;
}

}  // namespace thermovem
