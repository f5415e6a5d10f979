#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "thermovem/mesh.hpp"
#include "thermovem/postprocess.hpp"
#include "thermovem/solver.hpp"

namespace vemflow {

/// Settings shared by every subcommand that solves.
struct SolveOptions {
  int k = 2;
  thermovem::FixedPointConfig fixed_point;
  std::string out_dir = ".";
  bool write_files = true;
  int jobs = 1;
};

struct Test1Options {
  SolveOptions solve;
  std::vector<std::string> families{"quad", "tri", "voronoi", "random"};
  std::vector<int> refinements{4, 8, 16, 32};
  double quad_distortion = 0.15;
  std::uint64_t seed = 1;
};

struct Test2Options {
  SolveOptions solve;
  std::vector<int> levels{1, 2, 3, 4, 5};
};

/// Outcome of one mesh of a run.
struct RunSummary {
  std::string name;  // family_invh or test2_level
  std::string family;
  int inv_h = 0;
  bool converged = false;
  int iterations = 0;
  int heat_size = 0;
  int oseen_size = 0;
  bool divergence_free = false;
  double worst_divergence_ratio = 0.0;  // max over iterates of div / (1 + |u|_1)
  double theta_min = 0.0;               // extremal theta - 1 (Test 2 only)
  double theta_max = 0.0;
  thermovem::ErrorRow errors;
  std::vector<thermovem::IterationRecord> history;
};

struct Test1Result {
  std::vector<RunSummary> runs;
  std::vector<thermovem::RateRow> rates;
  bool all_converged() const;
};

struct Test2Result {
  std::vector<RunSummary> runs;
  bool all_converged() const;
};

/// Mesh of a Test 1 family at nominal 1/h; voronoi and random use inv_h^2 seeds.
thermovem::PolygonalMesh family_mesh(const std::string& family, int inv_h, double quad_distortion,
                                     std::uint64_t seed);

Test1Result run_test1(const Test1Options& options);
Test2Result run_test2(const Test2Options& options);

/// Flat key=value configuration; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(std::istream& in);

/// Runs the problem described by a config file. Returns the per-mesh summaries.
std::vector<RunSummary> run_config(const ConfigMap& config, const SolveOptions& defaults);

void write_test1_tables(const std::string& out_dir, const Test1Result& result);
void write_test2_table(const std::string& out_dir, const Test2Result& result);

std::vector<int> parse_int_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

/// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vemflow
