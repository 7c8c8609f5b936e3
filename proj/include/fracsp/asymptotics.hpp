#pragma once

// Large-a harness: sweeps over a, power-law fits of the energy, concentration
// checks and the local uniqueness probe.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsp/minimizer.hpp"

namespace fracsp {

struct SweepRecord {
  double a = 0.0;
  double a_over_sqrt_astar = 0.0;
  double eps = 0.0;
  double L = 0.0;  // half width of the grid used for this a
  double h = 0.0;
  double e1 = 0.0;
  double mu = 0.0;
  double mu_eps2s = 0.0;
  double profile_dist_l2 = 0.0;    // || v - Q ||_2, v = sqrt(a*) eps^{3/2} u(eps x + x_max)
  double profile_dist_linf = 0.0;  // || v - Q ||_inf
  double rescaled_mass = 0.0;      // || v ||_2^2
  Vec3 x_max{};
  Vec3 x0{};
  Vec3 y_rescaled{};               // (x_max - x0) / eps
  double decay_exponent = 0.0;     // NaN when the fit window has non-positive samples
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool complete = true;  // false when a solve failed to converge; records are partial
  std::string failure;
  std::vector<Field> fields;  // final u per record, when kept
};

// Fixed column order of the sweep CSV.
const std::vector<std::string>& sweep_columns();
std::vector<double> sweep_row(const SweepRecord& r);

struct SweepOptions {
  bool keep_fields = false;
  const LandscapeReport* landscape = nullptr;  // supplies x0; nearest well otherwise
};

// One minimization per a (increasing, params m = 1). Each point uses a grid
// with the reference profile's n and half width eps(a) * L_ref, so the
// rescaled profile lands exactly on the reference grid of q. Throws if
// eps < 4h would result.
SweepResult run_sweep(const Potential& pot, const Params& prm_base,
                      const std::vector<double>& a_list, const SolverConfig& cfg,
                      const GroundStateQ& q, const SweepOptions& opts = {});

// Grid used for the sweep point at a.
Grid sweep_grid(const GroundStateQ& q, double a, const Params& prm);

// The rescaled profile sqrt(a*) eps^{3/2} u(eps x + x_max) on q's grid.
Field rescaled_profile(const Field& u, const Vec3& x_max, double eps, const GroundStateQ& q);

struct ScalingFit {
  double exponent = 0.0;        // slope of log(-e1) against log(a / sqrt(a*))
  double log_prefactor = 0.0;   // intercept, so -e1 ~ exp(log_prefactor) (a/sqrt(a*))^exponent
  double r_squared = 0.0;
  double target_exponent = 0.0;
  double target_constant = 0.0;
  // e1(a_max) / (a_max/sqrt(a*))^target_exponent, to compare with target_constant.
  double prefactor_ratio = 0.0;
};

ScalingFit fit_energy_scaling(const std::vector<SweepRecord>& records, double s, double p);

struct ConcentrationReport {
  double final_distance = 0.0;   // dist(x_max, Z0) at the largest a
  double distance_bound = 0.0;   // 4h + 2 eps at the largest a
  bool distance_ok = false;
  bool within_two_h = false;         // final distance <= 2h
  bool distance_decreasing = false;  // non-increasing dist(x_max, Z0) along the sweep
  bool profile_decreasing = false;   // strictly decreasing profile_dist_l2
  double final_profile_rel = 0.0;    // profile_dist_l2 / ||Q||_2 at the largest a
  bool y_checked = false;            // |Z0| = 1
  double y_offset = 0.0;             // |y_rescaled - y0| at the largest a
  bool y_ok = false;
  std::size_t nearest_well = 0;      // Z0 member closest to the final x_max
};

ConcentrationReport check_concentration(const std::vector<SweepRecord>& records,
                                        const LandscapeReport& landscape, const Potential& pot,
                                        double a_star);

struct ProbeOptions {
  Vec3 center{};        // seeds are centred in center + [-spread, spread]^3
  double spread = 0.0;
  double width = 0.0;   // seed width, required
  bool snap_to_grid = false;  // round seed centres to grid points
};

struct ProbeResult {
  int starts = 0;
  int converged = 0;
  std::vector<std::string> notices;
  double max_distance = 0.0;             // max pairwise L-infinity distance, raw fields
  double max_distance_recentered = 0.0;  // same after moving each maximum to the origin cell
  double u_inf = 0.0;                    // largest ||u||_inf among converged starts
  std::vector<MinimizeResult> results;
};

// n_starts minimizations from independent random seeds drawn from cfg.seed.
ProbeResult uniqueness_probe(const EnergyModel& model, const SolverConfig& cfg, int n_starts,
                             const ProbeOptions& opts = {});

}  // namespace fracsp
