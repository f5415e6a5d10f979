#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

namespace vemflow {

namespace fs = std::filesystem;
using namespace thermovem;

namespace {

template <class Fn>
auto run_parallel(std::size_t count, int jobs, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> results(count);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < count; start += batch) {
    std::vector<std::future<Result>> pending;
    for (std::size_t i = start; i < std::min(count, start + batch); ++i) pending.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = 0; i < pending.size(); ++i) results[start + i] = pending[i].get();
  }
  return results;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

void check_options(const SolveOptions& options) {
  if (options.k != 2) throw std::invalid_argument("only k = 2 is supported (got k = " + std::to_string(options.k) + ")");
  if (!(options.fixed_point.tolerance > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (options.fixed_point.max_iters < 1) throw std::invalid_argument("--max-iters must be at least 1");
}

RunSummary solve_one(const CoupledProblem& problem, const PolygonalMesh& mesh, const std::string& name,
                     const std::string& family, int inv_h, const SolveOptions& options) {
  const auto disc = Discretization::build(mesh, options.k, problem.boundary);
  std::ostringstream log;
  const SolverState state = fixed_point_solve(problem, disc, options.fixed_point, &log);

  RunSummary run;
  run.name = name;
  run.family = family;
  run.inv_h = inv_h;
  run.converged = state.converged;
  run.iterations = state.iterations;
  run.heat_size = state.heat_size;
  run.oseen_size = state.oseen_size;
  run.divergence_free = state.divergence_free(options.fixed_point.divergence_factor);
  for (const auto& record : state.history) {
    run.worst_divergence_ratio = std::max(run.worst_divergence_ratio, record.divergence / (1.0 + record.velocity_seminorm));
  }
  run.history = state.history;
  std::tie(run.theta_min, run.theta_max) = extremal_dof_values(state.theta, 1.0);

  run.errors.family = family;
  run.errors.k = options.k;
  run.errors.inv_h = inv_h;
  run.errors.status = state.converged ? "converged" : "not_converged";
  if (problem.exact) run.errors.report = compute_errors(disc, state, *problem.exact);
  run.errors.report.h_measured = mesh.mesh_size();
  run.errors.report.dofs_heat = state.heat_size;
  run.errors.report.dofs_oseen = state.oseen_size;
  run.errors.report.n_it = state.iterations;

  if (options.write_files) {
    auto iters = open_output((fs::path(options.out_dir) / ("iters_" + name + ".log")).string());
    iters << log.str();
    export_fields((fs::path(options.out_dir) / ("fields_" + name + ".csv")).string(), disc, state);
    write_mesh((fs::path(options.out_dir) / ("mesh_" + name + ".txt")).string(), mesh);
  }
  return run;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + value + "'");
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return x;
}

ViscosityLaw parse_viscosity(const std::string& text) {
  if (text == "quadratic") return ViscosityLaw::quadratic();
  const std::string prefix = "constant:";
  if (text.rfind(prefix, 0) == 0) return ViscosityLaw::constant(parse_number("viscosity", text.substr(prefix.size())));
  throw std::invalid_argument("unknown viscosity law '" + text + "' (use quadratic or constant:<value>)");
}

void write_runs_table(const std::string& path, const std::vector<RunSummary>& runs) {
  auto out = open_output(path);
  out << "name,family,inv_h,dofs_heat,dofs_oseen,n_it,status\n";
  for (const auto& r : runs) {
    out << r.name << ',' << r.family << ',' << r.inv_h << ',' << r.heat_size << ',' << r.oseen_size << ','
        << r.iterations << ',' << (r.converged ? "converged" : "not_converged") << '\n';
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

bool Test1Result::all_converged() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.converged; });
}

bool Test2Result::all_converged() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.converged; });
}

PolygonalMesh family_mesh(const std::string& family, int inv_h, double quad_distortion, std::uint64_t seed) {
  if (inv_h < 1) throw std::invalid_argument("refinement 1/h must be positive");
  if (family == "quad") return generate_quadrilateral(inv_h, quad_distortion, seed);
  if (family == "tri") return generate_triangular(inv_h);
  if (family == "voronoi") return generate_voronoi(inv_h * inv_h, 100, seed);
  if (family == "random") return generate_voronoi(inv_h * inv_h, 0, seed);
  throw std::invalid_argument("unknown mesh family '" + family + "' (use quad, tri, voronoi, random)");
}

Test1Result run_test1(const Test1Options& options) {
  check_options(options.solve);
  if (options.refinements.empty()) throw std::invalid_argument("refinement list is empty");
  std::vector<int> refinements = options.refinements;
  std::sort(refinements.begin(), refinements.end());
  refinements.erase(std::unique(refinements.begin(), refinements.end()), refinements.end());
  for (const auto& family : options.families) family_mesh(family, 1, options.quad_distortion, options.seed);
  if (options.solve.write_files) ensure_directory(options.solve.out_dir);

  std::vector<std::pair<std::string, int>> cases;
  for (const auto& family : options.families) {
    for (int inv_h : refinements) cases.emplace_back(family, inv_h);
  }
  const auto problem = make_test1_problem();
  Test1Result result;
  result.runs = run_parallel(cases.size(), options.solve.jobs, [&](std::size_t i) {
    const auto& [family, inv_h] = cases[i];
    const auto mesh = family_mesh(family, inv_h, options.quad_distortion, options.seed);
    return solve_one(problem, mesh, family + "_" + std::to_string(inv_h), family, inv_h, options.solve);
  });
  std::vector<ErrorRow> rows;
  for (const auto& run : result.runs) rows.push_back(run.errors);
  result.rates = compute_rates(rows);
  if (options.solve.write_files) write_test1_tables(options.solve.out_dir, result);
  return result;
}

Test2Result run_test2(const Test2Options& options) {
  check_options(options.solve);
  if (options.levels.empty()) throw std::invalid_argument("refinement list is empty");
  for (int level : options.levels) {
    if (level < 0 || level > 8) throw std::invalid_argument("test2 levels must lie in 0..8");
  }
  if (options.solve.write_files) ensure_directory(options.solve.out_dir);
  const auto problem = make_test2_problem();
  Test2Result result;
  result.runs = run_parallel(options.levels.size(), options.solve.jobs, [&](std::size_t i) {
    const int level = options.levels[i];
    const auto mesh = generate_test2_mesh(level);
    return solve_one(problem, mesh, "test2_" + std::to_string(level), "test2", 1 << level, options.solve);
  });
  if (options.solve.write_files) write_test2_table(options.solve.out_dir, result);
  return result;
}

void write_test1_tables(const std::string& out_dir, const Test1Result& result) {
  std::vector<ErrorRow> rows;
  for (const auto& run : result.runs) rows.push_back(run.errors);
  auto errors = open_output((fs::path(out_dir) / "errors.csv").string());
  write_errors_csv(errors, rows);
  auto rates = open_output((fs::path(out_dir) / "rates.csv").string());
  write_rates_csv(rates, result.rates);
}

void write_test2_table(const std::string& out_dir, const Test2Result& result) {
  auto out = open_output((fs::path(out_dir) / "test2.csv").string());
  out << "level,inv_h,dofs_heat,dofs_oseen,n_it,status,theta_minus_one_min,theta_minus_one_max\n";
  for (const auto& r : result.runs) {
    out << r.name.substr(r.name.find('_') + 1) << ',' << r.inv_h << ',' << r.heat_size << ',' << r.oseen_size << ','
        << r.iterations << ',' << (r.converged ? "converged" : "not_converged") << ',' << format_double(r.theta_min)
        << ',' << format_double(r.theta_max) << '\n';
  }
}

ConfigMap parse_config(std::istream& in) {
  ConfigMap config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
    if (config.count(key)) throw std::invalid_argument("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    config[key] = trim(line.substr(eq + 1));
  }
  return config;
}

std::vector<RunSummary> run_config(const ConfigMap& config, const SolveOptions& defaults) {
  static const std::vector<std::string> known{
      "problem", "family", "refinements", "levels", "distortion", "seed", "mesh", "k", "tol", "max_iters", "skew_temp",
      "out", "jobs", "viscosity", "conductivity", "heat_source", "theta_boundary", "lid_velocity", "momentum_convection"};
  for (const auto& [key, value] : config) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
  };
  SolveOptions solve = defaults;
  if (config.count("k")) solve.k = static_cast<int>(parse_number("k", config.at("k")));
  if (config.count("tol")) solve.fixed_point.tolerance = parse_number("tol", config.at("tol"));
  if (config.count("max_iters")) solve.fixed_point.max_iters = static_cast<int>(parse_number("max_iters", config.at("max_iters")));
  if (config.count("skew_temp")) solve.fixed_point.skew_temperature_convection = parse_bool("skew_temp", config.at("skew_temp"));
  if (config.count("out")) solve.out_dir = config.at("out");
  if (config.count("jobs")) solve.jobs = static_cast<int>(parse_number("jobs", config.at("jobs")));
  check_options(solve);

  const std::string problem_name = get("problem", "test1");
  const auto seed = static_cast<std::uint64_t>(parse_number("seed", get("seed", "1")));
  if (problem_name == "test1") {
    Test1Options options;
    options.solve = solve;
    options.families = parse_string_list(get("family", "quad"));
    options.refinements = parse_int_list(get("refinements", "4,8,16,32"));
    options.quad_distortion = parse_number("distortion", get("distortion", "0.15"));
    options.seed = seed;
    return run_test1(options).runs;
  }
  if (problem_name == "test2") {
    Test2Options options;
    options.solve = solve;
    options.levels = parse_int_list(get("levels", "1,2,3,4,5"));
    return run_test2(options).runs;
  }
  if (problem_name != "custom") throw std::invalid_argument("unknown problem '" + problem_name + "' (use test1, test2, custom)");

  CoupledProblem problem;
  problem.name = "custom";
  problem.coefficients.viscosity = parse_viscosity(get("viscosity", "quadratic"));
  const double kappa = parse_number("conductivity", get("conductivity", "1"));
  if (!(kappa > 0.0)) throw std::invalid_argument("conductivity must be positive");
  problem.coefficients.conductivity = [kappa](const Point&) { return kappa; };
  problem.coefficients.conductivity_lower = problem.coefficients.conductivity_upper = kappa;
  const double heat = parse_number("heat_source", get("heat_source", "0"));
  problem.coefficients.heat_source = [heat](const Point&) { return heat; };
  const double theta_b = parse_number("theta_boundary", get("theta_boundary", "0"));
  problem.boundary.temperature = [theta_b](const Point&) { return theta_b; };
  const double lid = parse_number("lid_velocity", get("lid_velocity", "0"));
  problem.boundary.velocity = [lid](const Point& x) {
    return x.y() >= 1.0 - 1e-12 ? Eigen::Vector2d(lid, 0.0) : Eigen::Vector2d::Zero().eval();
  };
  problem.momentum_convection = parse_bool("momentum_convection", get("momentum_convection", "true"));

  if (solve.write_files) ensure_directory(solve.out_dir);
  std::vector<RunSummary> runs;
  if (config.count("mesh")) {
    const auto mesh = read_mesh(config.at("mesh"));
    runs.push_back(solve_one(problem, mesh, "custom", "file", 0, solve));
  } else {
    const std::string family = get("family", "quad");
    const double distortion = parse_number("distortion", get("distortion", "0"));
    const auto refinements = parse_int_list(get("refinements", "8"));
    runs = run_parallel(refinements.size(), solve.jobs, [&](std::size_t i) {
      const auto mesh = family_mesh(family, refinements[i], distortion, seed);
      return solve_one(problem, mesh, "custom_" + family + "_" + std::to_string(refinements[i]), family, refinements[i], solve);
    });
  }
  if (solve.write_files) write_runs_table((fs::path(solve.out_dir) / "runs.csv").string(), runs);
  return runs;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& item : parse_string_list(text)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw std::invalid_argument("expected an integer list, got '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("refinement list is empty");
  return values;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergence-free virtual elements for Navier-Stokes flow coupled with heat transfer", "vemflow"};
  app.require_subcommand(1);
  app.fallthrough();

  SolveOptions solve;
  app.add_option("--k", solve.k, "Polynomial degree (only 2 is supported)")->capture_default_str();
  app.add_option("--tol", solve.fixed_point.tolerance, "Fixed-point tolerance")->capture_default_str();
  app.add_option("--max-iters", solve.fixed_point.max_iters, "Maximum fixed-point iterations")->capture_default_str();
  app.add_option("--out", solve.out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", solve.jobs, "Meshes solved concurrently")->check(CLI::PositiveNumber)->capture_default_str();
  bool no_skew = false;
  app.add_flag("--no-skew-temp", no_skew, "Use the non-skew temperature convection form");

  Test1Options test1;
  std::string families = "quad,tri,voronoi,random";
  std::string refinements = "4,8,16,32";
  auto* t1 = app.add_subcommand("test1", "Manufactured solution on the unit square");
  t1->add_option("--families", families, "Mesh families")->capture_default_str();
  t1->add_option("--refinements", refinements, "Values of 1/h")->capture_default_str();
  t1->add_option("--distortion", test1.quad_distortion, "Interior vertex jitter of the quad family")->capture_default_str();
  t1->add_option("--seed", test1.seed, "Seed for jittered and Voronoi meshes")->capture_default_str();

  Test2Options test2;
  std::string levels = "1,2,3,4,5";
  auto* t2 = app.add_subcommand("test2", "Passive scalar transport through the notched channel");
  t2->add_option("--levels", levels, "Refinement levels n, h = 2^-n")->capture_default_str();

  std::string config_path;
  auto* cfg = app.add_subcommand("solve", "Run the problem described by a key=value config file");
  cfg->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string family;
  int size = 0;
  std::uint64_t seed = 1;
  double distortion = 0.0;
  std::string mesh_out;
  auto* meshgen = app.add_subcommand("meshgen", "Write a generated mesh in the polymesh v1 format");
  meshgen->add_option("family", family, "quad, tri, voronoi, random or test2")->required();
  meshgen->add_option("n", size, "Cells per side, seed count, or test2 level")->required();
  meshgen->add_option("--seed", seed, "Random seed")->capture_default_str();
  meshgen->add_option("--distortion", distortion, "Interior vertex jitter (quad)")->capture_default_str();
  meshgen->add_option("--out", mesh_out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  solve.fixed_point.skew_temperature_convection = !no_skew;

  try {
    if (*t1) {
      test1.solve = solve;
      test1.families = parse_string_list(families);
      test1.refinements = parse_int_list(refinements);
      const auto result = run_test1(test1);
      for (const auto& r : result.runs) {
        out << r.name << ": " << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations
            << " iterations, heat " << r.heat_size << ", oseen " << r.oseen_size << ", err_u_h1 "
            << format_double(r.errors.report.err_u_h1) << '\n';
      }
      return result.all_converged() ? 0 : 1;
    }
    if (*t2) {
      test2.solve = solve;
      test2.levels = parse_int_list(levels);
      const auto result = run_test2(test2);
      for (const auto& r : result.runs) {
        out << r.name << ": " << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations
            << " iterations, theta - 1 in [" << format_double(r.theta_min) << ", " << format_double(r.theta_max) << "]\n";
      }
      return result.all_converged() ? 0 : 1;
    }
    if (*cfg) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read '" + config_path + "'");
      const auto runs = run_config(parse_config(in), solve);
      for (const auto& r : runs) {
        out << r.name << ": " << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations << " iterations\n";
      }
      return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.converged; }) ? 0 : 1;
    }
    if (*meshgen) {
      PolygonalMesh mesh = [&] {
        if (family == "quad") return generate_quadrilateral(size, distortion, seed);
        if (family == "tri") return generate_triangular(size);
        if (family == "voronoi") return generate_voronoi(size, 100, seed);
        if (family == "random") return generate_voronoi(size, 0, seed);
        if (family == "test2") return generate_test2_mesh(size);
        throw std::invalid_argument("unknown mesh family '" + family + "' (use quad, tri, voronoi, random, test2)");
      }();
      if (mesh_out.empty()) {
        write_mesh(out, mesh);
      } else {
        write_mesh(mesh_out, mesh);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "vemflow: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace vemflow
