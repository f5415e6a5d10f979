#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermovem/assembly.hpp"
#include "thermovem/problem.hpp"

namespace thermovem {
namespace {

constexpr double step = 1e-3;

// fourth-order central difference of f along direction `d`
template <class F>
auto central(F f, const Point& x, const Point& d) {
  return (8.0 * (f(x + step * d) - f(x - step * d)) - (f(x + 2 * step * d) - f(x - 2 * step * d))) / (12.0 * step);
}

TEST(ManufacturedLoads, MatchFiniteDifferenceResidual) {
  const auto problem = make_test1_problem();
  const auto& exact = *problem.exact;
  const auto& nu = problem.coefficients.viscosity;
  const Point ex(1, 0), ey(0, 1);

  // nu(theta) eps(u), column j holds row j of the tensor
  auto flux_row = [&](int row) {
    return [&, row](const Point& x) {
      const Eigen::Matrix2d g = exact.velocity_gradient(x);
      const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
      return Eigen::Vector2d(nu.value(exact.temperature(x)) * eps.row(row).transpose());
    };
  };
  auto theta_flux = [&](const Point& x) { return Eigen::Vector2d(exact.temperature_gradient(x)); };

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coord(0.01, 0.99);
  for (int sample = 0; sample < 1000; ++sample) {
    const Point x(coord(rng), coord(rng));
    Eigen::Vector2d div_flux;
    for (int i = 0; i < 2; ++i) div_flux(i) = central(flux_row(i), x, ex)(0) + central(flux_row(i), x, ey)(1);
    const Eigen::Vector2d grad_p(central(exact.pressure, x, ex), central(exact.pressure, x, ey));
    const Eigen::Vector2d u = exact.velocity(x);
    const Eigen::Vector2d f = -div_flux + exact.velocity_gradient(x) * u - grad_p;
    const Eigen::Vector2d f_closed = test1_force(x);
    EXPECT_LT((f - f_closed).norm(), 1e-5 * std::max(1.0, f_closed.norm())) << x.transpose();

    const double lap_theta = central(theta_flux, x, ex)(0) + central(theta_flux, x, ey)(1);
    const double g = -lap_theta + u.dot(exact.temperature_gradient(x));
    EXPECT_NEAR(g, test1_heat_source(x), 1e-5 * std::max(1.0, std::abs(g)));
  }
}

TEST(ManufacturedSolution, IsSolenoidalWithConsistentGradients) {
  const auto exact = *make_test1_problem().exact;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int sample = 0; sample < 200; ++sample) {
    const Point x(coord(rng), coord(rng));
    const Eigen::Matrix2d g = exact.velocity_gradient(x);
    EXPECT_NEAR(g.trace(), 0.0, 1e-12);
    const Eigen::Vector2d du_dx = central(exact.velocity, x, Point(1, 0));
    const Eigen::Vector2d du_dy = central(exact.velocity, x, Point(0, 1));
    EXPECT_LT((du_dx - g.col(0)).norm(), 1e-8);
    EXPECT_LT((du_dy - g.col(1)).norm(), 1e-8);
    EXPECT_NEAR(central(exact.temperature, x, Point(1, 0)), exact.temperature_gradient(x)(0), 1e-7);
  }
}

TEST(ManufacturedSolution, TemperatureVanishesOnHorizontalSides) {
  const auto exact = *make_test1_problem().exact;
  for (double s : {0.0, 0.3, 0.77, 1.0}) {
    EXPECT_NEAR(exact.temperature(Point(s, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(exact.temperature(Point(s, 1.0)), 0.0, 1e-15);
  }
}

TEST(ViscosityLaw, BoundsAndValues) {
  const auto law = ViscosityLaw::quadratic(1.5);
  EXPECT_EQ(law.value(1.0), 3.0);
  EXPECT_EQ(law.derivative(1.0), 2.0);
  EXPECT_EQ(law.lower, 2.0);
  EXPECT_EQ(law.upper, 4.25);
  EXPECT_TRUE(law.within_bounds(3.0));
  EXPECT_FALSE(law.within_bounds(5.0));
  const auto flat = ViscosityLaw::constant(1e-2);
  EXPECT_EQ(flat.value(123.0), 1e-2);
  EXPECT_EQ(flat.derivative(4.0), 0.0);
}

TEST(ChannelProblem, InflowAndOutflowFluxesBalance) {
  const auto problem = make_test2_problem();
  const auto rule = gauss_legendre(4);
  double inflow = 0.0, outflow = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    inflow += 2.0 * rule.weights[q] * problem.boundary.velocity(Point(0.0, 2.0 * rule.nodes[q]))(0);
    outflow += rule.weights[q] * problem.boundary.velocity(Point(4.0, 1.0 + rule.nodes[q]))(0);
  }
  EXPECT_NEAR(inflow, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(outflow, 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(problem.boundary.temperature_dirichlet_on(BoundaryTag::inflow));
  EXPECT_FALSE(problem.boundary.temperature_dirichlet_on(BoundaryTag::wall));
  EXPECT_FALSE(problem.skew_temperature_convection);
  EXPECT_FALSE(problem.momentum_convection);
  EXPECT_EQ(problem.exact->temperature(Point(2.0, 0.5)), 1.0);
}

}  // namespace
}  // namespace thermovem
