#pragma once

// Run configuration in TOML. Every section and key is optional; defaults are
// the reference setup. Unknown sections or keys are rejected, and parse_config
// reports every violated constraint at once.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracsp/energy.hpp"
#include "fracsp/minimizer.hpp"

namespace fracsp {

struct PotentialSpec {
  PotentialKind kind = PotentialKind::single_well;
  double V_inf = 1.0;
  double value = 0.0;                               // constant
  Vec3 center{};                                    // single_well
  double degree = 2.0;                              // single_well
  std::vector<std::pair<Vec3, double>> wells;       // multi_well: (x, r)
  std::string table_path;                           // custom_table: raw f64le on the run grid
  std::vector<Well> table_wells;                    // custom_table: declared wells (x, r, c)
};

struct RunConfig {
  std::uint64_t seed = 0;
  bool allow_any_s = false;
  Params params;
  int n = 64;
  double L = 16.0;
  PotentialSpec potential;
  SolverConfig solver;
  Variant variant = Variant::full;
  // Reference profile used for rescaled seeding and the sweep grids.
  int q_n = 64;
  double q_L = 8.0;
  double q_tol = 1e-10;
  int q_max_iter = 500;
  std::vector<double> a_factors{8, 16, 32, 64, 128};  // sweep a values in units of sqrt(a*)
  int gradient_pairs = 5;                             // check: random (u, v) pairs per variant
  std::string output_dir = "out";
  bool write_json = true;
  bool write_csv = true;
  bool write_fields = false;
};

// Command-line override "section.key" = value, where value is TOML syntax
// (bare words are taken as strings).
using Override = std::pair<std::string, std::string>;

RunConfig parse_config(const std::string& path, const std::vector<Override>& overrides = {});
RunConfig parse_config_string(const std::string& text, const std::vector<Override>& overrides = {},
                              const std::string& source = "<string>");

// Builds the configured potential. box_half_width is used for the multi-well
// margin check; custom tables are read for grid g.
Potential build_potential(const PotentialSpec& spec, const Grid& g, double box_half_width);

}  // namespace fracsp
