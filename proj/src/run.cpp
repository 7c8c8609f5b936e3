#include "fracsp/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

#include "fracsp/asymptotics.hpp"
#include "fracsp/error.hpp"
#include "fracsp/io.hpp"
#include "json.hpp"

namespace fracsp {
namespace {

using json = nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

double rel_dev(double value, double target) { return std::abs(value - target) / std::abs(target); }

json potential_json(const PotentialSpec& p) {
  json wells = json::array();
  for (const Well& w : p.table_wells) {
    json o = {{"x", vec_json(w.x)}, {"r", w.r}};
    if (p.kind == PotentialKind::custom_table) o["c"] = w.c;
    wells.push_back(o);
  }
  return {{"kind", to_string(p.kind)}, {"V_inf", p.V_inf},        {"value", p.value},
          {"center", vec_json(p.center)}, {"degree", p.degree},   {"wells", wells},
          {"table_path", p.table_path}};
}

json config_to_json(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  json formats = json::array();
  if (c.write_json) formats.push_back("json");
  if (c.write_csv) formats.push_back("csv");
  if (c.write_fields) formats.push_back("fields");
  return {{"seed", c.seed},
          {"allow_any_s", c.allow_any_s},
          {"params", {{"s", c.params.s}, {"p", c.params.p}, {"a", c.params.a}, {"m", c.params.m}}},
          {"grid", {{"n", c.n}, {"L", c.L}}},
          {"potential", potential_json(c.potential)},
          {"solver",
           {{"tol_residual", s.tol_residual},
            {"tol_energy", s.tol_energy},
            {"stagnation_window", s.stagnation_window},
            {"step0", s.step0},
            {"armijo", s.armijo},
            {"max_iter", s.max_iter},
            {"enforce_nonneg", s.enforce_nonneg},
            {"precondition", s.precondition},
            {"seed_kind", to_string(s.seed_kind)},
            {"seed_well", s.seed_well},
            {"seed_width", s.seed_width},
            {"variant", to_string(c.variant)}}},
          {"qsolver", {{"n", c.q_n}, {"L", c.q_L}, {"tol", c.q_tol}, {"max_iter", c.q_max_iter}}},
          {"sweep", {{"a_factors", c.a_factors}}},
          {"check", {{"gradient_pairs", c.gradient_pairs}}},
          {"output", {{"dir", c.output_dir}, {"formats", formats}}}};
}

json energy_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic},
          {"potential_term", e.potential_term},
          {"hartree", e.hartree},
          {"power", e.power},
          {"total", e.total}};
}

struct Check {
  std::string name;
  double value;
  double target;
  double tolerance;
  bool pass;
  bool informational = false;
};

// Collects results and failures for one subcommand and writes its outputs.
class Report {
 public:
  Report(std::string name, const RunConfig& cfg, std::ostream& log)
      : name_(std::move(name)), stem_(name_), cfg_(cfg), log_(log) {
    std::replace(stem_.begin(), stem_.end(), '-', '_');
  }

  json& results() { return results_; }
  void fail(const std::string& msg) {
    failures_.push_back(msg);
    log_ << "FAIL " << msg << "\n";
  }
  void check(const Check& c) {
    checks_.push_back(c);
    log_ << (c.pass ? "pass " : c.informational ? "info " : "FAIL ") << c.name << " = "
         << format_double(c.value) << " (target " << format_double(c.target) << ", tol "
         << format_double(c.tolerance) << ")\n";
    if (!c.pass && !c.informational) failures_.push_back(c.name);
  }
  bool has_checks() const { return !checks_.empty(); }
  std::string path(const std::string& suffix) const {
    return (std::filesystem::path(cfg_.output_dir) / (stem_ + suffix)).string();
  }
  void field(const std::string& tag, const Field& u) {
    if (cfg_.write_fields) write_field(path("_" + tag), u);
  }
  void csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    if (cfg_.write_csv) write_csv(path(".csv"), header, rows);
  }
  void csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    if (cfg_.write_csv) write_csv(path(".csv"), header, rows);
  }

  int finish() {
    if (has_checks()) {
      json arr = json::array();
      std::vector<std::vector<std::string>> rows;
      for (const Check& c : checks_) {
        arr.push_back({{"name", c.name},
                       {"value", c.value},
                       {"target", c.target},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass},
                       {"informational", c.informational}});
        rows.push_back({c.name, format_double(c.value), format_double(c.target),
                        format_double(c.tolerance), c.pass ? "true" : "false",
                        c.informational ? "true" : "false"});
      }
      results_["checks"] = arr;
      if (name_ == "check")
        csv({"name", "value", "target", "tolerance", "pass", "informational"}, rows);
    }
    const bool ok = failures_.empty();
    json doc = {{"subcommand", name_},
                {"config", config_to_json(cfg_)},
                {"results", results_},
                {"status", ok ? "ok" : "failed"},
                {"failures", failures_}};
    if (cfg_.write_json || !ok) write_text(path(".json"), doc.dump(2) + "\n");
    log_ << name_ << ": " << (ok ? "ok" : "failed") << "\n";
    return ok ? 0 : 1;
  }

 private:
  std::string name_;
  std::string stem_;  // file name stem
  const RunConfig& cfg_;
  std::ostream& log_;
  json results_ = json::object();
  std::vector<std::string> failures_;
  std::vector<Check> checks_;
};

GroundStateQ reference_q(const RunConfig& cfg, std::ostream& log) {
  log << "solving Q on n = " << cfg.q_n << ", L = " << format_double(cfg.q_L) << "\n";
  return solve_Q(Grid(cfg.q_n, cfg.q_L), cfg.params.s, cfg.params.p, cfg.q_tol, cfg.q_max_iter);
}

json q_json(const GroundStateQ& q) {
  return {{"a_star", q.a_star},
          {"residual", q.residual},
          {"relative_residual", q.relative_residual()},
          {"stabilizer", q.stabilizer},
          {"iterations", q.iterations},
          {"pohozaev_ratios", q.pohozaev_ratios},
          {"decay_exponent", q.decay_exponent},
          {"decay_r_squared", q.decay_r_squared},
          {"n", q.Q.grid().n()},
          {"L", q.Q.grid().L()}};
}

json landscape_json(const LandscapeReport& land) {
  json wells = json::array();
  for (const WellLandscape& w : land.per_well) {
    json mins = json::array();
    for (const Vec3& y : w.minimizers) mins.push_back(vec_json(y));
    json hess = json::array();
    for (const auto& row : w.hessian) hess.push_back(json::array({row[0], row[1], row[2]}));
    wells.push_back({{"well", w.well},
                     {"lambda_bar", w.lambda_bar},
                     {"y0", vec_json(w.y0)},
                     {"hessian", hess},
                     {"hessian_min_eig", w.hessian_min_eig},
                     {"minimizers", mins},
                     {"converged", w.converged}});
  }
  return {{"r", land.r},
          {"zbar", land.zbar},
          {"z0", land.z0},
          {"lambda_bar_0", land.lambda_bar_0},
          {"per_well", wells},
          {"nondegenerate", land.nondegenerate},
          {"satisfies_v3", land.satisfies_v3},
          {"converged", land.converged}};
}

void cmd_solve_q(const RunConfig& cfg, Report& rep, std::ostream& log) {
  const Params& prm = cfg.params;
  Grid g(cfg.n, cfg.L);
  log << "solving Q on n = " << cfg.n << ", L = " << format_double(cfg.L) << "\n";
  GroundStateQ q = solve_Q(g, prm.s, prm.p, cfg.q_tol, cfg.q_max_iter);
  rep.results() = q_json(q);
  rep.results()["gn_ratio"] = gn_ratio(q.Q, prm.s, prm.p);
  rep.results()["gn_constant"] = gn_constant(prm.s, prm.p, q.a_star);
  rep.check({"q_relative_residual", q.relative_residual(), 0.0, 1e-6,
             q.relative_residual() < 1e-6});
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < g.n(); ++i) rows.push_back({g.coord(i), q.Q(i, g.n() / 2, g.n() / 2)});
  rep.csv({"x", "Q"}, rows);
  rep.field("Q", q.Q);
}

void cmd_solve(const RunConfig& cfg, Report& rep, std::ostream& log) {
  Grid g(cfg.n, cfg.L);
  Potential pot = build_potential(cfg.potential, g, cfg.L);
  std::optional<GroundStateQ> q;
  if (cfg.solver.seed_kind == SeedKind::rescaled_Q) q = reference_q(cfg, log);
  EnergyModel model(g, pot, cfg.params, cfg.variant != Variant::tilde);
  log << "minimizing variant " << to_string(cfg.variant) << " at a = "
      << format_double(cfg.params.a) << "\n";
  MinimizeResult r = minimize(model, cfg.solver, cfg.variant, q ? &*q : nullptr);
  json& res = rep.results();
  res["energy"] = energy_json(r.energy);
  res["mu"] = r.mu;
  res["mu_from_energy"] = multiplier_from_energy(r.u, model, cfg.variant);
  res["residual"] = r.residual;
  res["iterations"] = r.iterations;
  res["evaluations"] = r.evaluations;
  res["converged"] = r.converged;
  res["stop_reason"] = r.stop_reason;
  res["x_max"] = vec_json(r.x_max);
  res["u_max"] = r.u.max_abs();
  res["mass"] = norm_l2sq(r.u);
  if (q) res["a_star"] = q->a_star;
  if (!r.converged)
    rep.fail("minimization did not converge (residual " + format_double(r.residual) +
             ", stop: " + r.stop_reason + ")");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i)
    rows.push_back({double(i), r.energy_trace[i]});
  rep.csv({"iteration", "energy"}, rows);
  rep.field("u", r.u);
}

void cmd_landscape(const RunConfig& cfg, Report& rep, std::ostream& log) {
  Grid g(cfg.n, cfg.L);
  Potential pot = build_potential(cfg.potential, g, cfg.L);
  log << "solving Q on n = " << cfg.n << ", L = " << format_double(cfg.L) << "\n";
  GroundStateQ q = solve_Q(g, cfg.params.s, cfg.params.p, cfg.q_tol, cfg.q_max_iter);
  LandscapeReport land = analyze_landscape(pot, q.Q, q.a_star);
  rep.results() = landscape_json(land);
  rep.results()["a_star"] = q.a_star;
  json ratios = json::array();
  for (std::size_t i = 0; i < pot.wells().size(); ++i)
    ratios.push_back(local_model_ratios(pot, i, g.h()));
  rep.results()["local_model_ratios"] = ratios;
  if (!land.converged) rep.fail("landscape minimization did not converge");
  std::vector<std::vector<double>> rows;
  for (const WellLandscape& w : land.per_well) {
    const Vec3& x = pot.wells()[w.well].x;
    bool in_z0 = std::find(land.z0.begin(), land.z0.end(), w.well) != land.z0.end();
    rows.push_back({double(w.well), x[0], x[1], x[2], pot.wells()[w.well].r,
                    pot.wells()[w.well].c, w.lambda_bar, w.y0[0], w.y0[1], w.y0[2],
                    w.hessian_min_eig, in_z0 ? 1.0 : 0.0});
  }
  rep.csv({"well", "x", "y", "z", "r", "c", "lambda_bar", "y0_x", "y0_y", "y0_z",
           "hessian_min_eig", "in_z0"},
          rows);
}

void cmd_sweep(const RunConfig& cfg, Report& rep, std::ostream& log) {
  const Params& prm = cfg.params;
  if (std::abs(prm.m - 1.0) > 1e-15) {
    rep.fail("sweep requires params.m = 1");
    return;
  }
  if (cfg.potential.kind == PotentialKind::custom_table) {
    rep.fail("sweep needs an analytic potential; custom tables are tied to one grid");
    return;
  }
  Grid g(cfg.n, cfg.L);
  Potential pot = build_potential(cfg.potential, g, cfg.L);
  GroundStateQ q = reference_q(cfg, log);
  log << "solving Q on n = " << cfg.n << ", L = " << format_double(cfg.L)
      << " for the landscape\n";
  GroundStateQ q_land = solve_Q(g, prm.s, prm.p, cfg.q_tol, cfg.q_max_iter);
  std::optional<LandscapeReport> land;
  if (!pot.wells().empty()) land = analyze_landscape(pot, q_land.Q, q_land.a_star);

  std::vector<double> a_list;
  for (double f : cfg.a_factors) a_list.push_back(f * std::sqrt(q.a_star));
  SweepOptions opts;
  opts.landscape = land ? &*land : nullptr;
  opts.keep_fields = cfg.write_fields;
  SweepResult sw = run_sweep(pot, prm, a_list, cfg.solver, q, opts);

  json& res = rep.results();
  res["a_star"] = q.a_star;
  res["complete"] = sw.complete;
  res["columns"] = sweep_columns();
  std::vector<std::vector<double>> rows;
  json recs = json::array();
  for (const SweepRecord& r : sw.records) {
    rows.push_back(sweep_row(r));
    json o;
    const auto& cols = sweep_columns();
    std::vector<double> vals = sweep_row(r);
    for (std::size_t i = 0; i < cols.size(); ++i) o[cols[i]] = vals[i];
    recs.push_back(o);
    log << "a/sqrt(a*) = " << format_double(r.a_over_sqrt_astar) << ": e1 = "
        << format_double(r.e1) << ", mu eps^2s = " << format_double(r.mu_eps2s)
        << ", profile distance = " << format_double(r.profile_dist_l2) << "\n";
  }
  res["records"] = recs;
  rep.csv(sweep_columns(), rows);
  for (std::size_t i = 0; i < sw.fields.size(); ++i)
    rep.field("u" + std::to_string(i), sw.fields[i]);
  if (!sw.complete) {
    rep.fail(sw.failure);
    return;
  }
  if (land) res["landscape"] = landscape_json(*land);

  const double s = prm.s, p = prm.p;
  const SweepRecord& last = sw.records.back();
  if (sw.records.size() >= 4) {
    ScalingFit fit = fit_energy_scaling(sw.records, s, p);
    res["fit"] = {{"exponent", fit.exponent},
                  {"log_prefactor", fit.log_prefactor},
                  {"r_squared", fit.r_squared},
                  {"target_exponent", fit.target_exponent},
                  {"target_constant", fit.target_constant},
                  {"prefactor_ratio", fit.prefactor_ratio}};
    rep.check({"energy_exponent_rel", rel_dev(fit.exponent, fit.target_exponent), 0.0, 0.05,
               rel_dev(fit.exponent, fit.target_exponent) < 0.05});
    rep.check({"prefactor_ratio_rel", rel_dev(fit.prefactor_ratio, fit.target_constant), 0.0,
               0.10, rel_dev(fit.prefactor_ratio, fit.target_constant) < 0.10});
  } else {
    log << "fewer than 4 sweep points; energy fit skipped\n";
  }
  const double mu_dev = std::abs(last.mu_eps2s + 1.0);
  rep.check({"multiplier_limit", mu_dev, 0.0, 0.1, mu_dev < 0.1});
  const double tilde_scale = std::abs(law::energy_constant(s, p));
  const double eps_scale =
      rel_dev(std::pow(last.eps, 2.0 * s) * std::abs(last.e1), tilde_scale);
  rep.check({"eps_energy_scale_rel", eps_scale, 0.0, 0.10, eps_scale < 0.10});
  const double mass_dev = rel_dev(last.rescaled_mass, q.a_star);
  rep.check({"rescaled_mass_rel", mass_dev, 0.0, 0.05, mass_dev < 0.05});
  const double decay_dev = rel_dev(last.decay_exponent, 3.0 + 2.0 * s);
  rep.check({"minimizer_decay_rel", decay_dev, 0.0, 0.15, decay_dev < 0.15});

  if (land && !land->z0.empty()) {
    ConcentrationReport cr = check_concentration(sw.records, *land, pot, q.a_star);
    res["concentration"] = {{"final_distance", cr.final_distance},
                            {"distance_bound", cr.distance_bound},
                            {"distance_ok", cr.distance_ok},
                            {"within_two_h", cr.within_two_h},
                            {"distance_decreasing", cr.distance_decreasing},
                            {"profile_decreasing", cr.profile_decreasing},
                            {"final_profile_rel", cr.final_profile_rel},
                            {"y_checked", cr.y_checked},
                            {"y_offset", cr.y_offset},
                            {"y_ok", cr.y_ok},
                            {"nearest_well", cr.nearest_well}};
    rep.check({"final_distance_to_z0", cr.final_distance, 0.0, cr.distance_bound,
               cr.distance_ok});
    rep.check({"profile_distance_decreasing", cr.profile_decreasing ? 1.0 : 0.0, 1.0, 0.0,
               cr.profile_decreasing});
    rep.check({"final_profile_rel", cr.final_profile_rel, 0.0, 0.05,
               cr.final_profile_rel < 0.05});
    if (cr.y_checked)
      rep.check({"y_offset", cr.y_offset, 0.0, 0.5, cr.y_ok});
  }
}

void cmd_check(const RunConfig& cfg, Report& rep, std::ostream& log) {
  const Params& prm = cfg.params;
  const double s = prm.s, p = prm.p;
  Grid g(cfg.n, cfg.L);
  log << "solving Q on n = " << cfg.n << ", L = " << format_double(cfg.L) << "\n";
  GroundStateQ q = solve_Q(g, s, p, cfg.q_tol, cfg.q_max_iter);
  rep.results()["q"] = q_json(q);

  rep.check({"q_relative_residual", q.relative_residual(), 0.0, 1e-6,
             q.relative_residual() < 1e-6});
  const double t_pow = law::pohozaev_target_power(s, p), t_mass = law::pohozaev_target_mass(s, p);
  rep.check({"pohozaev_power_rel", rel_dev(q.pohozaev_ratios[0], t_pow), 0.0, 0.02,
             rel_dev(q.pohozaev_ratios[0], t_pow) < 0.02});
  rep.check({"pohozaev_mass_rel", rel_dev(q.pohozaev_ratios[1], t_mass), 0.0, 0.02,
             rel_dev(q.pohozaev_ratios[1], t_mass) < 0.02});
  const double gn = rel_dev(gn_ratio(q.Q, s, p), gn_constant(s, p, q.a_star));
  rep.check({"gn_equality_rel", gn, 0.0, 0.02, gn < 0.02});
  const double vir = virial_check(q.Q, s);
  rep.check({"virial_rel", vir, 0.0, 0.02, vir < 0.02});
  KernelCheck kc = linearized_kernel_check(q.Q, s, p);
  for (int i = 0; i < 3; ++i)
    rep.check({"kernel_residual_" + std::string(1, char('x' + i)), kc.kernel_residuals[i], 0.0,
               5e-2, kc.kernel_residuals[i] < 5e-2});
  rep.check({"pseudo_eigen_error", kc.pseudo_eigen_error, 0.0, 5e-2,
             kc.pseudo_eigen_error < 5e-2});
  const double decay = rel_dev(q.decay_exponent, 3.0 + 2.0 * s);
  rep.check({"q_decay_rel", decay, 0.0, 0.10, decay < 0.10, true});

  Potential pot = build_potential(cfg.potential, g, cfg.L);
  EnergyModel model(g, pot, prm);
  const std::uint64_t base = cfg.seed * 0x100000001B3ULL;
  for (Variant v : {Variant::full, Variant::V0, Variant::Vinf, Variant::tilde}) {
    double worst = 0.0;
    for (int k = 0; k < cfg.gradient_pairs; ++k) {
      Field u = random_smooth_field(g, base + 2 * std::uint64_t(k) + 1);
      Field w = random_smooth_field(g, base + 2 * std::uint64_t(k) + 2);
      worst = std::max(worst, gradient_fd_error(model, u, w, v));
    }
    rep.check({"gradient_fd_" + to_string(v), worst, 0.0, 1e-5, worst < 1e-5});
  }
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"solve-q", "solve", "sweep", "landscape",
                                                 "check"};
  return names;
}

std::string usage_text() {
  return "usage: fracsp <subcommand> [--config FILE] [--section.key VALUE ...]\n"
         "subcommands:\n"
         "  solve-q    ground profile Q on [grid] with identity diagnostics\n"
         "  solve      constrained minimization for [params] on [grid]\n"
         "  sweep      large-a sweep with energy fit and concentration checks\n"
         "  landscape  well landscape H_i, Z0 and nondegeneracy\n"
         "  check      diagnostic suite: Pohozaev, GN, virial, kernel, gradients\n";
}

std::string config_json(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& log) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    log << "unknown subcommand '" << subcommand << "'\n" << usage_text();
    return 2;
  }
  Report rep(subcommand, cfg, log);
  try {
    if (subcommand == "solve-q") cmd_solve_q(cfg, rep, log);
    else if (subcommand == "solve") cmd_solve(cfg, rep, log);
    else if (subcommand == "sweep") cmd_sweep(cfg, rep, log);
    else if (subcommand == "landscape") cmd_landscape(cfg, rep, log);
    else cmd_check(cfg, rep, log);
  } catch (const Error& e) {
    rep.fail(e.what());
  }
  return rep.finish();
}

}  // namespace fracsp
