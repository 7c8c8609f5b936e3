#include "fracsp/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "fracsp/error.hpp"

namespace fracsp {

std::string to_string(SeedKind k) {
  switch (k) {
    case SeedKind::gaussian: return "gaussian";
    case SeedKind::rescaled_Q: return "rescaled_Q";
    case SeedKind::custom: return "custom";
  }
  return "?";
}

SeedKind seed_kind_from_string(const std::string& s) {
  if (s == "gaussian") return SeedKind::gaussian;
  if (s == "rescaled_Q") return SeedKind::rescaled_Q;
  if (s == "custom") return SeedKind::custom;
  throw Error("unknown seed kind '" + s + "'");
}

void SolverConfig::validate() const {
  std::ostringstream err;
  if (!(tol_residual > 0.0)) err << "solver.tol_residual must be positive; ";
  if (!(tol_energy > 0.0)) err << "solver.tol_energy must be positive; ";
  if (stagnation_window < 1) err << "solver.stagnation_window must be at least 1; ";
  if (!(step0 > 0.0)) err << "solver.step0 must be positive; ";
  if (!(armijo > 0.0 && armijo <= 0.5)) err << "solver.armijo must lie in (0, 1/2]; ";
  if (max_iter < 1) err << "solver.max_iter must be at least 1; ";
  if (seed_well < -1) err << "solver.seed_well must be -1 or a well index; ";
  if (!(seed_width > 0.0)) err << "solver.seed_width must be positive; ";
  std::string msg = err.str();
  if (!msg.empty()) throw Error(msg.substr(0, msg.size() - 2));
}

Field project_mass(const Field& u, double m) {
  double mass = norm_l2sq(u);
  require(mass > 0.0 && std::isfinite(mass), "project_mass: zero or non-finite field");
  Field out = u;
  out *= std::sqrt(m / mass);
  return out;
}

Field gaussian_seed(const Grid& g, const Vec3& c, double width, double m) {
  const double inv = 1.0 / (2.0 * width * width);
  Field u = sample(g, [&](double x, double y, double z) {
    double dx = x - c[0], dy = y - c[1], dz = z - c[2];
    return std::exp(-(dx * dx + dy * dy + dz * dz) * inv);
  });
  return project_mass(u, m);
}

Field rescaled_Q_seed(const Grid& g, const GroundStateQ& q, const Params& prm, const Vec3& c) {
  const double eps = law::blowup_scale(prm.a, q.a_star, prm.s, prm.p);
  const double amp = std::pow(eps, -1.5) * std::sqrt(prm.m / q.a_star);
  Field u = sample(g, [&](double x, double y, double z) {
    return amp * trilinear(q.Q, (x - c[0]) / eps, (y - c[1]) / eps, (z - c[2]) / eps);
  });
  return project_mass(u, prm.m);
}

Field random_seed(const Grid& g, std::uint64_t seed, const Vec3& center, double spread,
                  double width, double m, bool snap_to_grid) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec3 c = center;
  for (double& v : c) {
    v += spread * unit(rng);
    if (snap_to_grid) v = g.coord(int(std::lround((v + g.L()) / g.h())) % g.n());
  }
  Field u = gaussian_seed(g, c, width, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= 1.0 + 0.1 * unit(rng);
  return project_mass(u, m);
}

namespace {

Vec3 seed_center(const Potential& pot, int well) {
  if (pot.wells().empty()) return {0.0, 0.0, 0.0};
  require(well >= 0 && std::size_t(well) < pot.wells().size(), "seed well index out of range");
  return pot.wells()[std::size_t(well)].x;
}

double residual_of(const Field& g, const Field& u, double mu) {
  double acc = 0.0, uu = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double r = g[i] - mu * u[i];
    acc += r * r;
    uu += u[i] * u[i];
  }
  return std::sqrt(acc / uu);
}

double recent_max(const std::deque<double>& h) { return *std::max_element(h.begin(), h.end()); }

double magnitude(const EnergyBreakdown& e) {
  return std::abs(e.kinetic) + std::abs(e.potential_term) + std::abs(e.hartree) +
         std::abs(e.power);
}

}  // namespace

Field make_seed(const EnergyModel& model, const SolverConfig& cfg, const GroundStateQ* q,
                int well) {
  const Vec3 c = seed_center(model.potential(), well);
  switch (cfg.seed_kind) {
    case SeedKind::gaussian:
      return gaussian_seed(model.grid(), c, cfg.seed_width, model.params().m);
    case SeedKind::rescaled_Q:
      require(q != nullptr, "rescaled_Q seeding requires the ground profile Q");
      return rescaled_Q_seed(model.grid(), *q, model.params(), c);
    case SeedKind::custom:
      throw Error("custom seeding requires an explicit seed field");
  }
  throw Error("unknown seed kind");
}

MinimizeResult minimize(const EnergyModel& model, const SolverConfig& cfg, Variant variant,
                        const Field& seed) {
  cfg.validate();
  const Grid& grid = model.grid();
  const double m = model.params().m;
  const double s = model.params().s;
  require(seed.grid() == grid, "seed grid does not match the energy model");

  auto nonneg = [&](Field& f) {
    if (cfg.enforce_nonneg)
      for (double& v : f.data()) v = std::abs(v);
  };

  Field u = seed;
  nonneg(u);
  u = project_mass(u, m);
  Field g(grid);
  EnergyBreakdown E = model.energy_and_gradient(u, variant, g);

  MinimizeResult res(u);
  res.evaluations = 1;
  res.energy_trace.push_back(E.total);
  double mu = inner(g, u) / m;
  double residual = residual_of(g, u, mu);
  double best_residual = residual;
  std::deque<double> residual_hist{residual};

  std::optional<Field> prev_u, prev_d;
  double tau = cfg.step0;
  int stagnant = 0;
  int it = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  res.stop_reason = "max_iter";

  for (; it < cfg.max_iter; ++it) {
    if (residual < cfg.tol_residual) {
      res.stop_reason = "residual";
      break;
    }
    // Working from r = g - mu u keeps the direction free of the cancellation
    // between the large parts of g and mu u.
    Field r = g;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= mu * u[i];
    Field d = r;
    if (cfg.precondition) {
      const double sigma = std::max(std::abs(mu), 1.0);
      auto P = [&](double k2) { return 1.0 / ((k2 == 0.0 ? 0.0 : std::pow(k2, s)) + sigma); };
      Field Pr = apply_multiplier(r, P);
      Field Pu = apply_multiplier(u, P);
      const double coef = inner(Pr, u) / inner(Pu, u);
      d = std::move(Pr);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= coef * Pu[i];
    }
    const double slope = 2.0 * inner(r, d);
    if (!(slope > 0.0)) {
      res.stop_reason = "no_descent";
      break;
    }

    if (prev_u) {
      Field sv = u - *prev_u;
      Field yv = d - *prev_d;
      double sy = inner(sv, yv);
      tau = sy > 0.0 ? sy / norm_l2sq(yv) : cfg.step0;
    }
    tau = std::clamp(tau, 1e-6 * cfg.step0, 1e2 * cfg.step0);

    const double slack = 64.0 * eps * magnitude(E);
    Field trial(grid), gt(grid);
    EnergyBreakdown Et;
    bool accepted = false;
    for (int halving = 0; halving <= 40; ++halving) {
      trial = u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= tau * d[i];
      nonneg(trial);
      trial = project_mass(trial, m);
      Et = model.energy_and_gradient(trial, variant, gt);
      ++res.evaluations;
      const double pred = cfg.armijo * tau * slope;
      // Once the predicted decrease drops below energy round-off the energy
      // can no longer rank trials; require the residual not to grow instead.
      bool ok = Et.total <= E.total - pred;
      if (!ok && tau * slope < slack && Et.total <= E.total + slack)
        ok = residual_of(gt, trial, inner(gt, trial) / m) <= recent_max(residual_hist);
      if (ok) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search failed after 40 halvings at iteration " << it
          << " (energy " << E.total << ", residual " << residual << ")";
      throw Error(msg.str());
    }

    const double change = std::abs(Et.total - E.total) / std::max(magnitude(Et), 1e-300);
    prev_u = std::move(u);
    prev_d = std::move(d);
    u = std::move(trial);
    g = std::move(gt);
    E = Et;
    res.energy_trace.push_back(E.total);
    mu = inner(g, u) / m;
    residual = residual_of(g, u, mu);
    residual_hist.push_back(residual);
    if (residual_hist.size() > 10) residual_hist.pop_front();

    if (change < cfg.tol_energy && residual >= best_residual) {
      if (++stagnant >= cfg.stagnation_window) {
        ++it;
        res.stop_reason = "energy_stagnation";
        break;
      }
    } else {
      stagnant = 0;
    }
    best_residual = std::min(best_residual, residual);
  }

  res.u = std::move(u);
  res.energy = E;
  res.mu = multiplier(res.u, model, variant);
  res.residual = el_residual(res.u, model, res.mu, variant);
  res.iterations = it;
  res.converged = res.residual < cfg.tol_residual;
  res.x_max_index = res.u.argmax();
  res.x_max = grid.point(res.x_max_index);
  return res;
}

MinimizeResult minimize(const EnergyModel& model, const SolverConfig& cfg, Variant variant,
                        const GroundStateQ* q) {
  const auto& wells = model.potential().wells();
  if (cfg.seed_well >= 0 || wells.size() <= 1)
    return minimize(model, cfg, variant, make_seed(model, cfg, q, std::max(cfg.seed_well, 0)));
  std::optional<MinimizeResult> best;
  for (std::size_t w = 0; w < wells.size(); ++w) {
    MinimizeResult r = minimize(model, cfg, variant, make_seed(model, cfg, q, int(w)));
    if (!best || r.energy.total < best->energy.total) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace fracsp
