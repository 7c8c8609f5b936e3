#include "fracsp/qsolver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fracsp/error.hpp"
#include "fracsp/fracops.hpp"

namespace fracsp {
namespace {

Field power_term(const Field& u, double p) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = u[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(u[i]), p - 1.0), u[i]);
  return out;
}

}  // namespace

double GroundStateQ::relative_residual() const { return residual / std::sqrt(a_star); }

double q_residual(const Field& u, double s, double p) {
  Field r = frac_laplacian(u, s);
  Field np = power_term(u, p);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] += u[i] - np[i];
  return std::sqrt(norm_l2sq(r) / norm_l2sq(u));
}

GroundStateQ solve_Q(const Grid& grid, double s, double p, double tol, int max_iter,
                     const std::optional<Field>& seed) {
  require(tol > 0.0, "solve_Q: tol must be positive");
  require(p > 2.0, "solve_Q: p must exceed 2");
  Field u = seed ? *seed
                 : sample(grid, [](double x, double y, double z) {
                     return std::exp(-(x * x + y * y + z * z));
                   });
  require(u.grid() == grid, "solve_Q: seed grid mismatch");
  const double gamma = (p - 1.0) / (p - 2.0);
  const double box = 2.0 * grid.L();
  const double inv_vol = 1.0 / (box * box * box);

  std::vector<double> trace;
  GroundStateQ out{Field(grid)};
  out.s = s;
  out.p = p;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    Field np = power_term(u, p);
    Spectrum su = to_spectral(u);
    Spectrum sn = to_spectral(np);
    double num = 0.0, den = 0.0;
    for_each_mode(grid, [&](std::size_t idx, double kx, double ky, double kz, double w) {
      double k2 = kx * kx + ky * ky + kz * kz;
      double sym = (k2 == 0.0 ? 0.0 : std::pow(k2, s)) + 1.0;
      num += w * sym * std::norm(su.c[idx]);
      den += w * (sn.c[idx] * std::conj(su.c[idx])).real();
      sn.c[idx] /= sym;
    });
    double S = (num * inv_vol) / (den * inv_vol);
    trace.push_back(S);
    if (!(S >= 1e-3 && S <= 1e3)) {
      std::ostringstream msg;
      msg << "solve_Q diverged at iteration " << it << "; stabilizer trace:";
      for (std::size_t k = trace.size() > 10 ? trace.size() - 10 : 0; k < trace.size(); ++k)
        msg << ' ' << trace[k];
      throw Error(msg.str());
    }
    u = from_spectral(sn);
    u *= std::pow(S, gamma);
    out.iterations = it;
    out.stabilizer = S;
    if (std::abs(S - 1.0) < tol && q_residual(u, s, p) < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve_Q did not converge in " << max_iter << " iterations (last S = "
        << out.stabilizer << ", residual = " << q_residual(u, s, p) << ")";
    throw Error(msg.str());
  }
  if (integral(u) < 0.0) u *= -1.0;
  out.Q = recenter(u);
  out.a_star = norm_l2sq(out.Q);
  out.residual = q_residual(out.Q, s, p) * std::sqrt(out.a_star);
  out.pohozaev_ratios = pohozaev_check(out.Q, s, p);
  try {
    DecayFit fit = decay_fit(out.Q);
    out.decay_exponent = fit.exponent;
    out.decay_r_squared = fit.r_squared;
  } catch (const Error&) {
    out.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    out.decay_r_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::array<double, 2> pohozaev_check(const Field& Q, double s, double p) {
  double sem = seminorm_sq(Q, s);
  double lp = std::pow(norm_lp(Q, p), p);
  double l2 = norm_l2sq(Q);
  return {sem / lp, sem / l2};
}

DecayFit decay_fit(const Field& u) {
  const Grid& g = u.grid();
  const int c = g.n() / 2;
  const double lo = 0.25 * g.L(), hi = 0.75 * g.L();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int cnt = 0;
  for (int axis = 0; axis < 3; ++axis)
    for (int dir : {1, -1})
      for (int t = 1; t <= c; ++t) {
        double r = t * g.h();
        if (r < lo - 1e-12 || r > hi + 1e-12) continue;
        int idx[3] = {c, c, c};
        idx[axis] = c + dir * t;
        if (idx[axis] < 0 || idx[axis] >= g.n()) continue;
        double v = u(idx[0], idx[1], idx[2]);
        if (!(v > 0.0)) throw Error("decay_fit: non-positive sample in the fit window");
        double lx = std::log(r), ly = std::log(v);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
        ++cnt;
      }
  require(cnt >= 3, "decay_fit: too few samples in the fit window");
  double cov = sxy - sx * sy / cnt;
  double vx = sxx - sx * sx / cnt;
  double vy = syy - sy * sy / cnt;
  DecayFit fit;
  fit.exponent = -cov / vx;
  fit.r_squared = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
  fit.power_law = fit.r_squared >= 0.99;
  fit.samples = cnt;
  return fit;
}

Field linearized_apply(const Field& Q, double s, double p, const Field& v) {
  Field out = frac_laplacian(v, s);
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] += v[i] - (p - 1.0) * std::pow(std::abs(Q[i]), p - 2.0) * v[i];
  return out;
}

KernelCheck linearized_kernel_check(const Field& Q, double s, double p) {
  KernelCheck kc;
  for (int axis = 0; axis < 3; ++axis) {
    Field d = derivative(Q, axis);
    Field Ld = linearized_apply(Q, s, p, d);
    kc.kernel_residuals[axis] = std::sqrt(norm_l2sq(Ld) / norm_l2sq(d));
  }
  Field w = Q + ((p - 2.0) / (2.0 * s)) * radial_derivative(Q);
  Field Lw = linearized_apply(Q, s, p, w);
  Field target = (-(p - 2.0)) * Q;
  kc.pseudo_eigen_error = std::sqrt(norm_l2sq(Lw - target) / norm_l2sq(target));
  return kc;
}

double linearized_gap_probe(const Field& Q, double s, double p, const Field& v) {
  Field w = v;
  // Gram-Schmidt against the three translation modes.
  std::vector<Field> basis;
  for (int axis = 0; axis < 3; ++axis) {
    Field d = derivative(Q, axis);
    for (const Field& b : basis) d -= inner(d, b) * b;
    d *= 1.0 / std::sqrt(norm_l2sq(d));
    basis.push_back(d);
  }
  for (const Field& b : basis) w -= inner(w, b) * b;
  Field Lw = linearized_apply(Q, s, p, w);
  return std::sqrt(norm_l2sq(Lw) / norm_l2sq(w));
}

double virial_check(const Field& u, double s) {
  const Grid& g = u.grid();
  const int n = g.n();
  double ring = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1)
          ring = std::max(ring, std::abs(u(i, j, k)));
  double peak = u.max_abs();
  if (!(ring < 1e-4 * peak)) {
    std::ostringstream msg;
    msg << "virial_check: field has not decayed at the boundary (boundary max " << ring
        << " vs peak " << peak << ")";
    throw Error(msg.str());
  }
  double lhs = inner(frac_laplacian(u, s), radial_derivative(u));
  double rhs = 0.5 * (2.0 * s - 3.0) * seminorm_sq(u, s);
  return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace fracsp
