#pragma once

// Mass-constrained minimization of the energy over { ||u||_2^2 = m } by a
// preconditioned projected gradient flow with Barzilai-Borwein steps and
// Armijo backtracking.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsp/energy.hpp"
#include "fracsp/qsolver.hpp"

namespace fracsp {

enum class SeedKind { gaussian, rescaled_Q, custom };

std::string to_string(SeedKind k);
SeedKind seed_kind_from_string(const std::string& s);

struct SolverConfig {
  double tol_residual = 1e-8;  // relative Euler-Lagrange residual
  double tol_energy = 1e-15;   // relative energy change counted as stagnation
  int stagnation_window = 25;  // consecutive stagnant steps before stopping
  double step0 = 1.0;
  double armijo = 1e-4;
  int max_iter = 4000;
  bool enforce_nonneg = true;
  bool precondition = true;    // Sobolev metric ((-Delta)^s + sigma)^{-1}
  SeedKind seed_kind = SeedKind::gaussian;
  int seed_well = 0;           // well used for seeding; -1 tries every well
  double seed_width = 1.0;     // Gaussian seed width
  std::uint64_t seed = 0;      // RNG seed for randomized starts

  // Throws listing every violated constraint.
  void validate() const;
};

struct MinimizeResult {
  explicit MinimizeResult(Field field) : u(std::move(field)) {}

  Field u;
  EnergyBreakdown energy;
  double mu = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int evaluations = 0;  // energy/gradient evaluations
  bool converged = false;
  std::string stop_reason;
  std::size_t x_max_index = 0;
  Vec3 x_max{};
  std::vector<double> energy_trace;  // energy of every accepted iterate, seed first
};

// u * sqrt(m / ||u||_2^2). Throws on the zero field.
Field project_mass(const Field& u, double m);

// exp(-|x - c|^2 / (2 w^2)) projected to mass m.
Field gaussian_seed(const Grid& g, const Vec3& c, double width, double m);

// eps^{-3/2} Q((x - c)/eps) sqrt(m / a*) with eps the blow-up scale at prm.a.
Field rescaled_Q_seed(const Grid& g, const GroundStateQ& q, const Params& prm, const Vec3& c);

// A Gaussian centred uniformly in center + [-spread, spread]^3 (optionally
// rounded to the nearest grid point) with 10% multiplicative noise, from a
// 64-bit seed.
Field random_seed(const Grid& g, std::uint64_t seed, const Vec3& center, double spread,
                  double width, double m, bool snap_to_grid = false);

// Seed per cfg.seed_kind at well cfg.seed_well (origin when there are no
// wells). rescaled_Q requires q.
Field make_seed(const EnergyModel& model, const SolverConfig& cfg,
                const GroundStateQ* q = nullptr, int well = 0);

MinimizeResult minimize(const EnergyModel& model, const SolverConfig& cfg, Variant variant,
                        const Field& seed);

// Seeds from cfg (rescaled_Q needs q). With seed_well = -1 every well is tried
// and the lowest energy kept; ties go to the lower well index.
MinimizeResult minimize(const EnergyModel& model, const SolverConfig& cfg, Variant variant,
                        const GroundStateQ* q = nullptr);

}  // namespace fracsp
