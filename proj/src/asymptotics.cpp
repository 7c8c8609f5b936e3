#include "fracsp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracsp/error.hpp"

namespace fracsp {
namespace {

double dist(const Vec3& a, const Vec3& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double linf(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Nearest member of Z0 (or of all wells when no landscape is given).
Vec3 nearest_anchor(const Vec3& x, const Potential& pot, const LandscapeReport* land) {
  std::vector<std::size_t> cand;
  if (land) {
    cand = land->z0;
  } else {
    for (std::size_t i = 0; i < pot.wells().size(); ++i) cand.push_back(i);
  }
  if (cand.empty()) return {0.0, 0.0, 0.0};
  Vec3 best = pot.wells()[cand.front()].x;
  for (std::size_t i : cand)
    if (dist(x, pot.wells()[i].x) < dist(x, best)) best = pot.wells()[i].x;
  return best;
}

}  // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "a",          "a_over_sqrt_astar", "eps",          "L",
      "h",          "e1",                "mu",           "mu_eps2s",
      "profile_dist_l2", "profile_dist_linf", "rescaled_mass", "x_max_x",
      "x_max_y",    "x_max_z",           "y_rescaled_x", "y_rescaled_y",
      "y_rescaled_z", "decay_exponent",  "residual",     "iterations",
      "converged"};
  return cols;
}

std::vector<double> sweep_row(const SweepRecord& r) {
  return {r.a,
          r.a_over_sqrt_astar,
          r.eps,
          r.L,
          r.h,
          r.e1,
          r.mu,
          r.mu_eps2s,
          r.profile_dist_l2,
          r.profile_dist_linf,
          r.rescaled_mass,
          r.x_max[0],
          r.x_max[1],
          r.x_max[2],
          r.y_rescaled[0],
          r.y_rescaled[1],
          r.y_rescaled[2],
          r.decay_exponent,
          r.residual,
          double(r.iterations),
          r.converged ? 1.0 : 0.0};
}

Grid sweep_grid(const GroundStateQ& q, double a, const Params& prm) {
  const double eps = law::blowup_scale(a, q.a_star, prm.s, prm.p);
  return Grid(q.Q.grid().n(), eps * q.Q.grid().L());
}

Field rescaled_profile(const Field& u, const Vec3& x_max, double eps, const GroundStateQ& q) {
  const double amp = std::sqrt(q.a_star) * std::pow(eps, 1.5);
  return sample(q.Q.grid(), [&](double x, double y, double z) {
    return amp * trilinear_periodic(u, eps * x + x_max[0], eps * y + x_max[1],
                                    eps * z + x_max[2]);
  });
}

SweepResult run_sweep(const Potential& pot, const Params& prm_base,
                      const std::vector<double>& a_list, const SolverConfig& cfg,
                      const GroundStateQ& q, const SweepOptions& opts) {
  require(!a_list.empty(), "run_sweep: empty a list");
  require(std::abs(prm_base.m - 1.0) < 1e-15, "run_sweep: the sweep is defined for m = 1");
  for (std::size_t i = 1; i < a_list.size(); ++i)
    require(a_list[i] > a_list[i - 1], "run_sweep: a values must be increasing");

  SweepResult out;
  for (double a : a_list) {
    Params prm = prm_base;
    prm.a = a;
    prm.validate(true);
    const double eps = law::blowup_scale(a, q.a_star, prm.s, prm.p);
    Grid g = sweep_grid(q, a, prm);
    if (eps < 4.0 * g.h() * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "run_sweep: eps = " << eps << " < 4h = " << 4.0 * g.h() << " at a = " << a
          << "; the rescaled profile would be unresolved";
      throw Error(msg.str());
    }
    check_wells_inside(pot, g);
    EnergyModel model(g, pot, prm);
    MinimizeResult r = minimize(model, cfg, Variant::full, &q);

    SweepRecord rec;
    rec.a = a;
    rec.a_over_sqrt_astar = a / std::sqrt(q.a_star);
    rec.eps = eps;
    rec.L = g.L();
    rec.h = g.h();
    rec.e1 = r.energy.total;
    rec.mu = r.mu;
    rec.mu_eps2s = r.mu * std::pow(eps, 2.0 * prm.s);
    rec.x_max = r.x_max;
    rec.residual = r.residual;
    rec.iterations = r.iterations;
    rec.converged = r.converged;

    Field v = rescaled_profile(r.u, r.x_max, eps, q);
    Field diff = v - q.Q;
    rec.profile_dist_l2 = std::sqrt(norm_l2sq(diff));
    rec.profile_dist_linf = linf(v, q.Q);
    rec.rescaled_mass = norm_l2sq(v);
    rec.x0 = nearest_anchor(r.x_max, pot, opts.landscape);
    for (int k = 0; k < 3; ++k) rec.y_rescaled[k] = (r.x_max[k] - rec.x0[k]) / eps;
    try {
      rec.decay_exponent = decay_fit(recenter(r.u)).exponent;
    } catch (const Error&) {
      rec.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    }

    out.records.push_back(rec);
    if (opts.keep_fields) out.fields.push_back(r.u);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "minimization did not converge at a = " << a << " (residual " << r.residual
          << ", stop: " << r.stop_reason << ")";
      out.complete = false;
      out.failure = msg.str();
      break;
    }
  }
  return out;
}

ScalingFit fit_energy_scaling(const std::vector<SweepRecord>& records, double s, double p) {
  require(records.size() >= 4, "fit_energy_scaling needs at least 4 records");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = double(records.size());
  for (const SweepRecord& r : records) {
    if (!(r.e1 < 0.0))
      throw Error("fit_energy_scaling: e1 >= 0 at a = " + std::to_string(r.a) +
                  " (pre-asymptotic regime)");
    double x = std::log(r.a_over_sqrt_astar), y = std::log(-r.e1);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cov = sxy - sx * sy / n;
  require(vx > 0.0, "fit_energy_scaling: a values must differ");
  ScalingFit fit;
  fit.exponent = cov / vx;
  fit.log_prefactor = (sy - fit.exponent * sx) / n;
  fit.r_squared = vy > 0.0 ? std::clamp(cov * cov / (vx * vy), 0.0, 1.0) : 1.0;
  fit.target_exponent = law::energy_exponent(s, p);
  fit.target_constant = law::energy_constant(s, p);
  const SweepRecord& last = records.back();
  fit.prefactor_ratio = last.e1 / std::pow(last.a_over_sqrt_astar, fit.target_exponent);
  return fit;
}

ConcentrationReport check_concentration(const std::vector<SweepRecord>& records,
                                        const LandscapeReport& landscape, const Potential& pot,
                                        double a_star) {
  require(!records.empty(), "check_concentration: no records");
  require(!landscape.z0.empty(), "check_concentration: landscape has no Z0 member");
  ConcentrationReport rep;
  auto dist_to_z0 = [&](const Vec3& x, std::size_t* which) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t w : landscape.z0) {
      double d = dist(x, pot.wells()[w].x);
      if (d < best) {
        best = d;
        if (which) *which = w;
      }
    }
    return best;
  };

  rep.distance_decreasing = true;
  rep.profile_decreasing = true;
  double prev_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    double d = dist_to_z0(records[i].x_max, nullptr);
    if (d > prev_d + 1e-12) rep.distance_decreasing = false;
    prev_d = d;
    if (i > 0 && !(records[i].profile_dist_l2 < records[i - 1].profile_dist_l2))
      rep.profile_decreasing = false;
  }
  const SweepRecord& last = records.back();
  rep.final_distance = dist_to_z0(last.x_max, &rep.nearest_well);
  rep.distance_bound = 4.0 * last.h + 2.0 * last.eps;
  rep.distance_ok = rep.final_distance < rep.distance_bound;
  rep.within_two_h = rep.final_distance <= 2.0 * last.h * (1.0 + 1e-12);
  rep.final_profile_rel = last.profile_dist_l2 / std::sqrt(a_star);

  if (landscape.z0.size() == 1) {
    const WellLandscape* wl = landscape.find(landscape.z0.front());
    if (wl) {
      rep.y_checked = true;
      const Vec3& xw = pot.wells()[landscape.z0.front()].x;
      Vec3 y;
      for (int k = 0; k < 3; ++k) y[k] = (last.x_max[k] - xw[k]) / last.eps;
      rep.y_offset = dist(y, wl->y0);
      rep.y_ok = rep.y_offset < 0.5;
    }
  }
  return rep;
}

ProbeResult uniqueness_probe(const EnergyModel& model, const SolverConfig& cfg, int n_starts,
                             const ProbeOptions& opts) {
  require(n_starts >= 1, "uniqueness_probe: n_starts must be at least 1");
  require(opts.width > 0.0, "uniqueness_probe: seed width must be positive");
  ProbeResult pr;
  pr.starts = n_starts;
  for (int i = 0; i < n_starts; ++i) {
    const std::uint64_t seed = cfg.seed + 0x9E3779B97F4A7C15ULL * std::uint64_t(i + 1);
    Field f = random_seed(model.grid(), seed, opts.center, opts.spread, opts.width,
                          model.params().m, opts.snap_to_grid);
    MinimizeResult r = minimize(model, cfg, Variant::full, f);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "start " << i << " did not converge (residual " << r.residual << ", stop: "
          << r.stop_reason << "); excluded";
      pr.notices.push_back(msg.str());
      continue;
    }
    pr.u_inf = std::max(pr.u_inf, r.u.max_abs());
    pr.results.push_back(std::move(r));
  }
  pr.converged = int(pr.results.size());
  std::vector<Field> centred;
  for (const MinimizeResult& r : pr.results) centred.push_back(recenter(r.u));
  for (std::size_t i = 0; i < pr.results.size(); ++i)
    for (std::size_t j = i + 1; j < pr.results.size(); ++j) {
      pr.max_distance = std::max(pr.max_distance, linf(pr.results[i].u, pr.results[j].u));
      pr.max_distance_recentered =
          std::max(pr.max_distance_recentered, linf(centred[i], centred[j]));
    }
  return pr;
}

}  // namespace fracsp
