// Acceptance gates. One PASS/FAIL line per primary criterion; indented lines
// carry the measured values. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "app.hpp"
#include "oracle.hpp"
#include "thermovem/forms.hpp"
#include "thermovem/problem.hpp"
#include "thermovem/vem_spaces.hpp"

namespace fs = std::filesystem;
using namespace thermovem;

namespace {

int failures = 0;

struct Criterion {
  std::string name;
  bool pass = true;
  std::vector<std::string> details;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok    " : "MISS  ") + what);
  }
  void note(const std::string& what) { details.push_back("note  " + what); }

  void report() {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1f s", seconds);
    std::cout << "[PRIMARY] " << (pass ? "PASS" : "FAIL") << "  " << name << "  (" << timing << ")\n";
    for (const auto& d : details) std::cout << "    " << d << '\n';
    std::cout.flush();
    if (!pass) ++failures;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

int hardware_jobs() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

void dof_counts() {
  Criterion c{"DoF counts on structured quadrilateral meshes, 1/h = 4..64"};
  const int table[5][3] = {{4, 49, 147}, {8, 225, 643}, {16, 961, 2691}, {32, 3969, 11011}, {64, 16129, 44547}};
  for (const auto& row : table) {
    const auto mesh = generate_quadrilateral(row[0]);
    const auto disc = Discretization::build(mesh, 2, BoundaryData{});
    const int n_theta = disc.dofs.temperature_size;
    const auto heat = assemble_heat(disc, CoefficientFields{}, Eigen::VectorXd::Zero(disc.dofs.velocity_size),
                                    Eigen::VectorXd::Zero(n_theta), true);
    const auto oseen = assemble_oseen(disc, CoefficientFields{}, Eigen::VectorXd::Zero(n_theta), Eigen::VectorXd(),
                                      Eigen::VectorXd::Zero(disc.dofs.velocity_size));
    const auto heat_size = static_cast<int>(heat.matrix.rows());
    const auto oseen_size = static_cast<int>(oseen.matrix.rows());
    c.check(heat_size == row[1] && oseen_size == row[2],
            "1/h=" + std::to_string(row[0]) + ": HEAT " + std::to_string(heat_size) + " (expected " +
                std::to_string(row[1]) + "), OSEEN " + std::to_string(oseen_size) + " (expected " +
                std::to_string(row[2]) + ")");
  }
  c.report();
}

void convergence_rates(const vemflow::Test1Result& result) {
  Criterion c{"Test 1 observed orders between 1/h = 16 and 32, quad and tri families"};
  for (const std::string family : {"quad", "tri"}) {
    const vemflow::RunSummary* finest = nullptr;
    for (const auto& r : result.runs) {
      if (r.family == family && r.inv_h == 32) finest = &r;
    }
    const RateRow* rate = nullptr;
    for (const auto& r : result.rates) {
      if (r.family == family && r.inv_h == 32) rate = &r;
    }
    if (!finest || !rate) {
      c.check(false, family + ": missing 1/h = 32 run");
      continue;
    }
    auto primary = [&](const char* label, double value) {
      c.check(value >= 1.7 && value <= 2.3, family + " " + label + " order " + fixed(value) + " in [1.7, 2.3]");
    };
    primary("err(u,H1)", rate->rate_u_h1);
    primary("err(theta,H1)", rate->rate_theta_h1);
    primary("err(p,L2)", rate->rate_p_l2);
    auto soft = [&](const char* label, double value) {
      const bool ok = value >= 2.6 && value <= 3.4;
      c.note(family + " " + label + " order " + fixed(value) + (ok ? " in" : " outside") +
             " soft band [2.6, 3.4]" + (ok ? "" : " (soft check, not gated)"));
    };
    soft("err(u,L2)", rate->rate_u_l2);
    soft("err(theta,L2)", rate->rate_theta_l2);
  }
  c.report();
}

void divergence_free(const vemflow::Test1Result& test1, const vemflow::Test2Result& test2) {
  Criterion c{"Every fixed-point iterate is divergence free, div <= 1e-10 (1 + |u|_1)"};
  std::vector<const vemflow::RunSummary*> runs;
  for (const auto& r : test1.runs) runs.push_back(&r);
  for (const auto& r : test2.runs) runs.push_back(&r);
  double worst = 0.0;
  std::size_t iterates = 0;
  for (const auto* r : runs) {
    worst = std::max(worst, r->worst_divergence_ratio);
    iterates += r->history.size();
    if (!r->divergence_free || r->history.empty()) c.check(false, r->name + ": ratio " + fmt(r->worst_divergence_ratio));
  }
  c.check(worst <= 1e-10, std::to_string(runs.size()) + " runs, " + std::to_string(iterates) +
                              " iterates, worst div / (1 + |u|_1) = " + fmt(worst));
  c.report();
}

void iteration_counts(const vemflow::Test1Result& result) {
  Criterion c{"Test 1 fixed point converges with tolerance 1e-7 in at most 10 iterations"};
  int most = 0;
  for (const auto& r : result.runs) {
    most = std::max(most, r.iterations);
    if (!r.converged || r.iterations > 10) c.check(false, r.name + ": " + std::to_string(r.iterations) + " iterations");
  }
  c.check(result.all_converged() && most <= 10,
          std::to_string(result.runs.size()) + " runs, largest N_IT = " + std::to_string(most));

  // increments should contract after the second iterate; reported only
  int late_growth = 0;
  for (const auto& r : result.runs) {
    for (std::size_t i = 2; i < r.history.size(); ++i) {
      if (r.history[i].du > r.history[i - 1].du) ++late_growth;
    }
  }
  c.note("velocity increment grew after iteration 2 in " + std::to_string(late_growth) +
         " steps (contraction, soft check)");
  c.report();
}

void pollution_free(const vemflow::Test2Result& result) {
  Criterion c{"Test 2 temperature stays at 1, max |theta_h - 1| <= 1e-6 for h = 2^-1..2^-4"};
  for (const auto& r : result.runs) {
    const double dev = std::max(std::abs(r.theta_min), std::abs(r.theta_max));
    c.check(r.converged && dev <= 1e-6, r.name + ": min " + fmt(r.theta_min) + ", max " + fmt(r.theta_max) + ", " +
                                            std::to_string(r.iterations) + " iterations");
  }
  c.report();
}

void element_oracle() {
  Criterion c{"Unit-square projectors match the brute-force oracle to 1e-6"};
  const auto oracle = oracle::unit_square_projectors();
  const auto e = build_element_projectors(ElementGeometry::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 2);
  const std::vector<std::pair<std::string, double>> diffs{
      {"temperature Pi_nabla", max_abs(e.temp.pi_nabla - oracle.temp_pi_nabla)},
      {"temperature Pi0", max_abs(e.temp.pi0 - oracle.temp_pi0)},
      {"temperature Pi0 grad", max_abs(e.temp.pi0_grad - oracle.temp_pi0_grad)},
      {"velocity Pi_nabla", max_abs(e.vel.pi_nabla - oracle.vel_pi_nabla)},
      {"velocity Pi0", max_abs(e.vel.pi0 - oracle.vel_pi0)},
      {"velocity Pi0 grad", max_abs(e.vel.pi0_grad - oracle.vel_pi0_grad)}};
  for (const auto& [name, d] : diffs) c.check(d <= 1e-6, name + ": max entry difference " + fmt(d));
  c.note("oracle constraint residual " + fmt(oracle.constraint_residual));
  c.report();
}

double binomial(int n, int r) {
  double v = 1.0;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

// int_E x^a y^b through Green's theorem, each edge expanded exactly
double green_moment(const std::vector<Point>& polygon, int a, int b) {
  double total = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point p = polygon[i];
    const Point d = polygon[(i + 1) % polygon.size()] - p;
    double edge = 0.0;
    for (int r = 0; r <= a + 1; ++r) {
      for (int s = 0; s <= b; ++s) {
        edge += binomial(a + 1, r) * std::pow(p.x(), a + 1 - r) * std::pow(d.x(), r) * binomial(b, s) *
                std::pow(p.y(), b - s) * std::pow(d.y(), s) / (r + s + 1);
      }
    }
    total += edge * d.y() / (a + 1);
  }
  return total;
}

// fourth-order central difference of f along direction e
template <class F>
auto central(const F& f, const Point& x, const Point& e) {
  const double h = 1e-3;
  return (-f(x + 2 * h * e) + 8 * f(x + h * e) - 8 * f(x - h * e) + f(x - 2 * h * e)) / (12 * h);
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {});
}

void property_suites(const fs::path& out) {
  Criterion c{"Property suites"};
  const std::vector<PolygonalMesh> meshes{generate_quadrilateral(6, 0.3), generate_triangular(4),
                                          generate_voronoi(48, 100, 5), generate_voronoi(48, 0, 6),
                                          generate_test2_mesh(1)};

  double reproduction = 0.0, kernel = 0.0, antisymmetry = 0.0, quadrature = 0.0;
  std::mt19937 rng(11);
  for (const auto& mesh : meshes) {
    const auto elements = build_all_projectors(mesh, 2);
    for (std::size_t cell = 0; cell < elements.size(); ++cell) {
      const auto& e = elements[cell];
      const int nk = poly_dim(2), nk1 = poly_dim(1);
      const Eigen::MatrixXd dx = e.basis.derivative_matrix(0).topRows(nk1);
      const Eigen::MatrixXd dy = e.basis.derivative_matrix(1).topRows(nk1);
      Eigen::MatrixXd grad(2 * nk1, nk);
      grad << dx, dy;
      Eigen::MatrixXd vgrad = Eigen::MatrixXd::Zero(4 * nk1, 2 * nk);
      vgrad.block(0, 0, nk1, nk) = dx;
      vgrad.block(nk1, 0, nk1, nk) = dy;
      vgrad.block(2 * nk1, nk, nk1, nk) = dx;
      vgrad.block(3 * nk1, nk, nk1, nk) = dy;
      Eigen::MatrixXd veps = vgrad;
      veps.middleRows(nk1, 2 * nk1).setZero();
      veps.middleRows(nk1, nk1) = 0.5 * (vgrad.middleRows(nk1, nk1) + vgrad.middleRows(2 * nk1, nk1));
      veps.middleRows(2 * nk1, nk1) = veps.middleRows(nk1, nk1);
      Eigen::MatrixXd vdiv(nk1, 2 * nk);
      vdiv << dx, dy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(nk, nk), vid = Eigen::MatrixXd::Identity(2 * nk, 2 * nk);
      for (double d : {max_abs(e.temp.pi_nabla * e.temp.dofs - id), max_abs(e.temp.pi0 * e.temp.dofs - id),
                       max_abs(e.temp.pi0_grad * e.temp.dofs - grad), max_abs(e.vel.pi_nabla * e.vel.dofs - vid),
                       max_abs(e.vel.pi0 * e.vel.dofs - vid), max_abs(e.vel.pi0_grad * e.vel.dofs - vgrad),
                       max_abs(e.vel.pi0_eps * e.vel.dofs - veps), max_abs(e.vel.div * e.vel.dofs - vdiv)}) {
        reproduction = std::max(reproduction, d);
      }
      kernel = std::max({kernel, max_abs(dofi_dofi(e.temp.dofs, e.temp.pi0) * e.temp.dofs),
                         max_abs(dofi_dofi(e.vel.dofs, e.vel.pi0) * e.vel.dofs)});
      const auto cv = local_cV(e, random_vector(e.vel.layout.size(), rng));
      const auto ct = local_cT(e, random_vector(e.vel.layout.size(), rng));
      antisymmetry = std::max({antisymmetry, max_abs(cv.skew + cv.skew.transpose()), max_abs(ct.skew + ct.skew.transpose())});

      const auto& g = mesh.geometry(static_cast<int>(cell));
      const int order = element_quadrature_order(2);
      const auto rule = polygon_quadrature(g, order);
      std::vector<Point> local;
      for (const auto& v : g.vertices) local.push_back((v - g.centroid) / g.diameter);
      const double scaled_area = g.area / (g.diameter * g.diameter);
      for (int a = 0; a <= order; ++a) {
        for (int b = 0; a + b <= order; ++b) {
          double q = 0.0;
          for (std::size_t i = 0; i < rule.size(); ++i) {
            const Point x = (rule.points[i] - g.centroid) / g.diameter;
            q += rule.weights[i] * std::pow(x.x(), a) * std::pow(x.y(), b);
          }
          q /= g.diameter * g.diameter;
          quadrature = std::max(quadrature, std::abs(q - green_moment(local, a, b)) / scaled_area);
        }
      }
    }
  }
  c.check(reproduction <= 1e-12, "projector polynomial reproduction, max defect " + fmt(reproduction));
  c.check(kernel <= 1e-12, "stabilization on polynomials, max entry " + fmt(kernel));
  c.check(antisymmetry == 0.0, "skew convection forms, max |C + C^T| " + fmt(antisymmetry));
  c.check(quadrature <= 1e-12, "quadrature vs Green moments, max relative error " + fmt(quadrature));

  const auto problem = make_test1_problem();
  const auto& exact = *problem.exact;
  const auto& nu = problem.coefficients.viscosity;
  const Point ex(1, 0), ey(0, 1);
  auto flux_row = [&](int row) {
    return [&, row](const Point& x) {
      const Eigen::Matrix2d g = exact.velocity_gradient(x);
      return Eigen::Vector2d(nu.value(exact.temperature(x)) * 0.5 * (g + g.transpose()).row(row).transpose());
    };
  };
  auto theta_flux = [&](const Point& x) { return Eigen::Vector2d(exact.temperature_gradient(x)); };
  std::uniform_real_distribution<double> coord(0.01, 0.99);
  double rhs = 0.0;
  for (int sample = 0; sample < 1000; ++sample) {
    const Point x(coord(rng), coord(rng));
    Eigen::Vector2d div_flux;
    for (int i = 0; i < 2; ++i) div_flux(i) = central(flux_row(i), x, ex)(0) + central(flux_row(i), x, ey)(1);
    const Eigen::Vector2d grad_p(central(exact.pressure, x, ex), central(exact.pressure, x, ey));
    const Eigen::Vector2d u = exact.velocity(x);
    const Eigen::Vector2d f = -div_flux + exact.velocity_gradient(x) * u - grad_p;
    const Eigen::Vector2d f_closed = test1_force(x);
    rhs = std::max(rhs, (f - f_closed).norm() / std::max(1.0, f_closed.norm()));
    const double heat = -(central(theta_flux, x, ex)(0) + central(theta_flux, x, ey)(1)) +
                        u.dot(exact.temperature_gradient(x));
    rhs = std::max(rhs, std::abs(heat - test1_heat_source(x)) / std::max(1.0, std::abs(heat)));
  }
  c.check(rhs <= 1e-5, "manufactured loads vs finite differences, max scaled error " + fmt(rhs));

  // the same runs twice, serial and threaded, must write identical bytes
  std::vector<fs::path> dirs;
  for (int jobs : {1, 4}) {
    const fs::path dir = out / ("determinism_" + std::to_string(jobs));
    fs::remove_all(dir);
    vemflow::Test1Options t1;
    t1.families = {"quad", "tri", "voronoi", "random"};
    t1.refinements = {4, 8};
    t1.solve.out_dir = dir.string();
    t1.solve.jobs = jobs;
    vemflow::run_test1(t1);
    vemflow::Test2Options t2;
    t2.levels = {1, 2};
    t2.solve.out_dir = dir.string();
    t2.solve.jobs = jobs;
    vemflow::run_test2(t2);
    dirs.push_back(dir);
  }
  int files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++files;
    if (same_bytes(entry.path(), dirs[1] / entry.path().filename())) ++identical;
  }
  const auto count = [](const fs::path& d) { return std::distance(fs::directory_iterator(d), fs::directory_iterator{}); };
  c.check(files > 0 && identical == files && count(dirs[1]) == files,
          "bitwise reproduction of output files, " + std::to_string(identical) + " of " + std::to_string(files) +
              " identical");
  c.report();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  std::cout << "acceptance: output in " << fs::absolute(out).string() << '\n';

  element_oracle();
  dof_counts();

  const auto solves_start = std::chrono::steady_clock::now();
  vemflow::Test1Options t1;
  t1.families = {"quad", "tri", "voronoi", "random"};
  t1.refinements = {4, 8, 16, 32};
  t1.solve.out_dir = (out / "test1").string();
  t1.solve.jobs = hardware_jobs();
  const auto test1 = vemflow::run_test1(t1);

  vemflow::Test2Options t2;
  t2.levels = {1, 2, 3, 4};
  t2.solve.out_dir = (out / "test2").string();
  t2.solve.jobs = hardware_jobs();
  const auto test2 = vemflow::run_test2(t2);
  std::printf("acceptance: Test 1 (16 meshes) and Test 2 (4 levels) solved in %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - solves_start).count());
  std::fflush(stdout);

  convergence_rates(test1);
  divergence_free(test1, test2);
  iteration_counts(test1);
  pollution_free(test2);
  property_suites(out);

  std::cout << (failures == 0 ? "acceptance: all primary criteria pass\n"
                              : "acceptance: " + std::to_string(failures) + " primary criterion(s) failed\n");
  return failures == 0 ? 0 : 1;
}
