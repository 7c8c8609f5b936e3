#include <cmath>

#include "doctest.h"
#include "fracsp/error.hpp"
#include "fracsp/minimizer.hpp"
#include "helpers.hpp"

using namespace fracsp;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Largest step-to-step increase relative to |E|. Steps accepted in the
// round-off regime may raise the energy by a few ulps.
double max_rise(const std::vector<double>& e) {
  double worst = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i)
    worst = std::max(worst, (e[i] - e[i - 1]) / std::abs(e[i - 1]));
  return worst;
}

}  // namespace

TEST_CASE("project_mass") {
  Grid g(16, 4.0);
  Field u = testing::random_field(g, 1);
  Field w = project_mass(u, 2.5);
  CHECK(norm_l2sq(w) == Approx(2.5).epsilon(1e-12));
  CHECK(testing::max_abs_diff(project_mass(w, 2.5), w) < 1e-15 * w.max_abs() * 4);
  const double ratio = w[0] / u[0];
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(w[i] - ratio * u[i]));
  CHECK(worst < 1e-14);
  CHECK(ratio > 0.0);
  CHECK_THROWS_AS(project_mass(Field(g), 1.0), Error);
}

TEST_CASE("solver config validation lists every violation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.tol_residual = 0.0;
  c.armijo = 0.7;
  c.max_iter = 0;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("tol_residual") != std::string::npos);
    CHECK(msg.find("armijo") != std::string::npos);
    CHECK(msg.find("max_iter") != std::string::npos);
  }
}

TEST_CASE("seeds carry the requested mass and are reproducible") {
  Grid g(16, 4.0);
  Field a = random_seed(g, 42, {0, 0, 0}, 1.0, 0.8, 3.0);
  Field b = random_seed(g, 42, {0, 0, 0}, 1.0, 0.8, 3.0);
  Field c = random_seed(g, 43, {0, 0, 0}, 1.0, 0.8, 3.0);
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
  CHECK(norm_l2sq(a) == Approx(3.0).epsilon(1e-12));
  Field s = random_seed(g, 42, {0, 0, 0}, 1.0, 0.8, 1.0, true);
  auto [i, j, k] = g.unravel(gaussian_seed(g, {0, 0, 0}, 0.8, 1.0).argmax());
  CHECK(i == 8);
  CHECK(j == 8);
  CHECK(k == 8);
  CHECK(norm_l2sq(s) == Approx(1.0).epsilon(1e-12));
  CHECK(seed_kind_from_string(to_string(SeedKind::rescaled_Q)) == SeedKind::rescaled_Q);
}

TEST_CASE("tilde minimizer at a = sqrt(a*) is Q / sqrt(a*)") {
  const auto& q = testing::q32();
  const Grid& g = q.Q.grid();
  const Params prm{0.9, 2.5, std::sqrt(q.a_star), 1.0};
  EnergyModel model(g, make_zero_potential(), prm, false);
  MinimizeResult r = minimize(model, SolverConfig{}, Variant::tilde);
  REQUIRE(r.converged);
  Field target = (1.0 / std::sqrt(q.a_star)) * q.Q;
  Field diff = recenter(r.u) - target;
  CHECK(std::sqrt(norm_l2sq(diff)) < 1e-3 * std::sqrt(norm_l2sq(target)));
  CHECK(r.mu == Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("converged single-well minimizer: invariants") {
  Grid g(32, 12.0);
  Potential v = make_single_well({0, 0, 0}, 2.0, 1.0);
  EnergyModel model(g, v, {0.9, 2.5, 3.0, 1.0});
  SolverConfig cfg;
  MinimizeResult r = minimize(model, cfg, Variant::full);
  REQUIRE(r.converged);
  CHECK(r.residual < cfg.tol_residual);
  CHECK(norm_l2sq(r.u) == Approx(1.0).epsilon(1e-10));
  double mn = 0.0;
  for (double x : r.u.values()) mn = std::min(mn, x);
  CHECK(mn >= 0.0);
  CHECK(max_rise(r.energy_trace) < 1e-12);
  CHECK(rel(r.mu, multiplier_from_energy(r.u, model)) < 1e-8);
  CHECK(rel(el_residual(r.u, model, r.mu), r.residual) < 1e-6);
  CHECK(r.x_max_index == r.u.argmax());
  CHECK(r.energy.total == r.energy_trace.back());

  // Determinism: identical inputs give bit-identical iterates.
  MinimizeResult again = minimize(model, cfg, Variant::full);
  CHECK(again.u.data() == r.u.data());
  CHECK(again.energy_trace == r.energy_trace);

  // The trapped ground state lies below the V_inf problem's.
  MinimizeResult inf = minimize(model, cfg, Variant::Vinf);
  REQUIRE(inf.converged);
  CHECK(r.energy.total < inf.energy.total);
}

TEST_CASE("V0 minimum energy does not depend on where the seed sits") {
  // A concentrated state, so the free-space Hartree term never sees the edge.
  Grid g(32, 6.0);
  const double a_param = 4.0 * std::sqrt(testing::q32().a_star);
  EnergyModel model(g, make_zero_potential(), {0.9, 2.5, a_param, 1.0});
  SolverConfig cfg;
  cfg.tol_residual = 1e-7;
  const double h = g.h();
  MinimizeResult a = minimize(model, cfg, Variant::V0, gaussian_seed(g, {0, 0, 0}, 0.5, 1.0));
  MinimizeResult b =
      minimize(model, cfg, Variant::V0, gaussian_seed(g, {4 * h, -2 * h, h}, 0.5, 1.0));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(rel(a.energy.total, b.energy.total) < 1e-8);
  CHECK(b.x_max[0] - a.x_max[0] == doctest::Approx(4 * h));
}

TEST_CASE("iteration cap yields an unconverged result") {
  Grid g(16, 8.0);
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), {0.9, 2.5, 3.0, 1.0});
  SolverConfig cfg;
  cfg.max_iter = 2;
  MinimizeResult r = minimize(model, cfg, Variant::full);
  CHECK_FALSE(r.converged);
  CHECK(r.stop_reason == "max_iter");
  CHECK(r.iterations == 2);
}

TEST_CASE("rescaled_Q seeding requires Q; custom requires a field") {
  Grid g(16, 8.0);
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), {0.9, 2.5, 3.0, 1.0});
  SolverConfig cfg;
  cfg.seed_kind = SeedKind::rescaled_Q;
  CHECK_THROWS_AS(minimize(model, cfg, Variant::full), Error);
  cfg.seed_kind = SeedKind::custom;
  CHECK_THROWS_AS(minimize(model, cfg, Variant::full), Error);
}

TEST_CASE("multi-start over wells keeps the lowest energy") {
  Grid g(32, 12.0);
  Potential v = make_multi_well({{{-2.0, 0, 0}, 2.0}, {{2.0, 0, 0}, 2.0}}, 1.0, 12.0);
  EnergyModel model(g, v, {0.9, 2.5, 3.0, 1.0});
  SolverConfig cfg;
  cfg.seed_well = -1;
  MinimizeResult all = minimize(model, cfg, Variant::full);
  cfg.seed_well = 0;
  MinimizeResult w0 = minimize(model, cfg, Variant::full);
  cfg.seed_well = 1;
  MinimizeResult w1 = minimize(model, cfg, Variant::full);
  CHECK(all.energy.total <= std::min(w0.energy.total, w1.energy.total));
}
