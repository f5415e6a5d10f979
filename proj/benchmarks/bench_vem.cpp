#include <benchmark/benchmark.h>

#include "thermovem/assembly.hpp"
#include "thermovem/problem.hpp"
#include "thermovem/solver.hpp"

namespace {

using namespace thermovem;

void BM_ElementProjectors(benchmark::State& state) {
  const auto mesh = generate_voronoi(64, 100, 1);
  const auto& cell = mesh.geometry(static_cast<int>(state.range(0)) % mesh.num_cells());
  for (auto _ : state) benchmark::DoNotOptimize(build_element_projectors(cell, 2));
}
BENCHMARK(BM_ElementProjectors)->Arg(0)->Arg(17);

void BM_Discretization(benchmark::State& state) {
  const auto mesh = generate_quadrilateral(static_cast<int>(state.range(0)), 0.15);
  for (auto _ : state) benchmark::DoNotOptimize(Discretization::build(mesh, 2, BoundaryData{}));
  state.SetItemsProcessed(state.iterations() * mesh.num_cells());
}
BENCHMARK(BM_Discretization)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AssembleOseen(benchmark::State& state) {
  const auto mesh = generate_quadrilateral(static_cast<int>(state.range(0)), 0.15);
  const auto problem = make_test1_problem();
  const auto disc = Discretization::build(mesh, 2, problem.boundary);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(disc.dofs.temperature_size, 0.3);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(disc.dofs.velocity_size, 0.1);
  const Eigen::VectorXd g = interpolate_dirichlet_velocity(mesh, disc.dofs, problem.boundary.velocity);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_oseen(disc, problem.coefficients, theta, w, g));
}
BENCHMARK(BM_AssembleOseen)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AssembleHeat(benchmark::State& state) {
  const auto mesh = generate_quadrilateral(static_cast<int>(state.range(0)), 0.15);
  const auto problem = make_test1_problem();
  const auto disc = Discretization::build(mesh, 2, problem.boundary);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(disc.dofs.velocity_size, 0.1);
  const Eigen::VectorXd theta_d = interpolate_dirichlet_temperature(disc.dofs, problem.boundary.temperature);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_heat(disc, problem.coefficients, u, theta_d, true));
}
BENCHMARK(BM_AssembleHeat)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FixedPointTest1(benchmark::State& state) {
  const auto mesh = generate_quadrilateral(static_cast<int>(state.range(0)), 0.15);
  const auto problem = make_test1_problem();
  const auto disc = Discretization::build(mesh, 2, problem.boundary);
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_solve(problem, disc, FixedPointConfig{}, nullptr));
}
BENCHMARK(BM_FixedPointTest1)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
