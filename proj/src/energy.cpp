#include "fracsp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracsp/error.hpp"

namespace fracsp {

void Params::validate(bool allow_any_s) const {
  std::ostringstream err;
  if (!allow_any_s && !(s > 0.75 && s < 1.0))
    err << "params.s = " << s << " must lie in (3/4, 1); ";
  if (!(s > 0.0 && s < 1.0)) err << "params.s = " << s << " must lie in (0, 1); ";
  const double p_hi = 2.0 + 4.0 * s / 3.0;
  if (!(p > 2.0 && p < p_hi))
    err << "params.p = " << p << " must satisfy 2 < p < 2 + 4s/3 = " << p_hi << "; ";
  if (!(a > 0.0)) err << "params.a = " << a << " must be positive; ";
  if (!(m > 0.0)) err << "params.m = " << m << " must be positive; ";
  if (err.str().empty()) {
    // Both follow from the p range; kept as a guard on the derived exponents.
    if (!(3.0 * p - 6.0 - 4.0 * s < 0.0)) err << "3p - 6 - 4s must be negative; ";
    if (!(6.0 - (3.0 - 2.0 * s) * p > 0.0)) err << "6 - (3-2s)p must be positive; ";
  }
  std::string msg = err.str();
  if (!msg.empty()) throw Error(msg.substr(0, msg.size() - 2));
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::V0: return "V0";
    case Variant::Vinf: return "Vinf";
    case Variant::tilde: return "tilde";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "V0") return Variant::V0;
  if (s == "Vinf") return Variant::Vinf;
  if (s == "tilde") return Variant::tilde;
  throw Error("unknown energy variant '" + s + "'");
}

EnergyModel::EnergyModel(const Grid& g, const Potential& pot, const Params& prm,
                         bool with_hartree)
    : grid_(g), pot_(pot), prm_(prm), v_(pot.on_grid(g)) {
  if (with_hartree) kernel_ = std::make_shared<const HartreeKernel>(g, prm.s);
}

const HartreeKernel& EnergyModel::kernel() const {
  require(kernel_ != nullptr, "energy model was built without the Hartree kernel");
  return *kernel_;
}

EnergyBreakdown EnergyModel::energy_and_gradient(const Field& u, Variant variant,
                                                 Field& grad) const {
  require(u.grid() == grid_, "field grid does not match energy model");
  const double s = prm_.s, p = prm_.p;
  const double coef = std::pow(prm_.a, p - 2.0);
  const double hv = grid_.cell_volume();

  // Kinetic part and (-Delta)^s u from one transform.
  Spectrum sp = to_spectral(u);
  double kin = 0.0;
  for_each_mode(grid_, [&](std::size_t idx, double kx, double ky, double kz, double w) {
    double k2 = kx * kx + ky * ky + kz * kz;
    double mult = k2 == 0.0 ? 0.0 : std::pow(k2, s);
    kin += w * mult * std::norm(sp.c[idx]);
    sp.c[idx] *= mult;
  });
  const double box = 2.0 * grid_.L();
  kin /= box * box * box;
  grad = from_spectral(sp);

  EnergyBreakdown e;
  e.kinetic = kin;

  double pow_sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double a = std::abs(u[i]);
    double ap = a == 0.0 ? 0.0 : std::pow(a, p - 1.0);
    pow_sum += ap * a;
    grad[i] -= coef * std::copysign(ap, u[i]);
  }
  e.power = 2.0 * coef / p * pow_sum * hv;

  if (variant != Variant::tilde) {
    Field phi = poisson_phi(u, kernel());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      d += phi[i] * u[i] * u[i];
      grad[i] -= phi[i] * u[i];
    }
    e.hartree = 0.5 * d * hv;
  }

  if (variant == Variant::full) {
    double vs = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      vs += v_[i] * u[i] * u[i];
      grad[i] += v_[i] * u[i];
    }
    e.potential_term = vs * hv;
  } else if (variant == Variant::Vinf) {
    const double vinf = pot_.V_inf();
    double mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mass += u[i] * u[i];
      grad[i] += vinf * u[i];
    }
    e.potential_term = vinf * mass * hv;
  }
  e.total = e.kinetic + e.potential_term - e.hartree - e.power;
  return e;
}

EnergyBreakdown EnergyModel::energy(const Field& u, Variant variant) const {
  Field g(grid_);
  return energy_and_gradient(u, variant, g);
}

Field EnergyModel::gradient(const Field& u, Variant variant) const {
  Field g(grid_);
  energy_and_gradient(u, variant, g);
  return g;
}

EnergyBreakdown energy(const Field& u, const Potential& pot, const Params& prm, Variant variant) {
  return EnergyModel(u.grid(), pot, prm, variant != Variant::tilde).energy(u, variant);
}

Field gradient(const Field& u, const Potential& pot, const Params& prm, Variant variant) {
  return EnergyModel(u.grid(), pot, prm, variant != Variant::tilde).gradient(u, variant);
}

namespace {
void require_mass(const Field& u, double m) {
  double mass = norm_l2sq(u);
  require(std::abs(mass - m) <= 1e-8 * m, "multiplier: mass constraint violated");
}
}  // namespace

double multiplier(const Field& u, const EnergyModel& model, Variant variant) {
  const double m = model.params().m;
  require_mass(u, m);
  return inner(model.gradient(u, variant), u) / m;
}

double multiplier_from_energy(const Field& u, const EnergyModel& model, Variant variant) {
  const Params& prm = model.params();
  require_mass(u, prm.m);
  EnergyBreakdown e = model.energy(u, variant);
  // e.hartree = D/2 and e.power = (2/p) a^{p-2} int|u|^p.
  double d_half = e.hartree;
  double pow_term = (prm.p - 2.0) / prm.p * (e.power * prm.p / 2.0);
  return (e.total - d_half - pow_term) / prm.m;
}

double el_residual(const Field& u, const EnergyModel& model, double mu, Variant variant) {
  Field r = model.gradient(u, variant);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] -= mu * u[i];
  return std::sqrt(norm_l2sq(r) / norm_l2sq(u));
}

double gradient_fd_error(const EnergyModel& model, const Field& u, const Field& v,
                         Variant variant, double t) {
  Field up = u, um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += t * v[i];
    um[i] -= t * v[i];
  }
  const double fd = (model.energy(up, variant).total - model.energy(um, variant).total) / (4.0 * t);
  const double an = inner(model.gradient(u, variant), v);
  const double scale = std::max(std::abs(an), std::abs(fd));
  return scale > 0.0 ? std::abs(an - fd) / scale : 0.0;
}

Field random_smooth_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = g.L();
  struct Bump { Vec3 c; double w, amp; };
  std::vector<Bump> bumps(6);
  for (Bump& b : bumps) {
    for (double& x : b.c) x = L * (unit(rng) - 0.5);
    b.w = L / 16.0 + (L / 6.0 - L / 16.0) * unit(rng);
    b.amp = 2.0 * unit(rng) - 1.0;
  }
  return sample(g, [&](double x, double y, double z) {
    double v = 0.0;
    for (const Bump& b : bumps) {
      double dx = x - b.c[0], dy = y - b.c[1], dz = z - b.c[2];
      v += b.amp * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.w * b.w));
    }
    return v;
  });
}

double gn_constant(double s, double p, double a_star) {
  require(a_star > 0.0, "gn_constant requires a* > 0");
  double denom = 6.0 - p * (3.0 - 2.0 * s);
  double pref = 2.0 * s * p / denom;
  double inner_ratio = denom / (3.0 * p - 6.0);
  double expo = 3.0 * (p - 2.0) / (4.0 * s);
  return pref * std::pow(inner_ratio, expo) / std::pow(std::sqrt(a_star), p - 2.0);
}

double gn_ratio(const Field& u, double s, double p) {
  double lp = std::pow(norm_lp(u, p), p);
  double sem = seminorm_sq(u, s);
  double l2 = std::sqrt(norm_l2sq(u));
  return lp / (std::pow(sem, 3.0 * (p - 2.0) / (4.0 * s)) *
               std::pow(l2, p - 3.0 * (p - 2.0) / (2.0 * s)));
}

namespace law {
double energy_exponent(double s, double p) { return 4.0 * s * (p - 2.0) / (4.0 * s + 6.0 - 3.0 * p); }
double energy_constant(double s, double p) {
  return (3.0 * p - 6.0 - 4.0 * s) / (6.0 - (3.0 - 2.0 * s) * p);
}
double eps_exponent(double s, double p) { return (2.0 * p - 4.0) / (3.0 * p - 6.0 - 4.0 * s); }
double blowup_scale(double a, double a_star, double s, double p) {
  return std::pow(a / std::sqrt(a_star), eps_exponent(s, p));
}
double pohozaev_target_power(double s, double p) { return 3.0 * (p - 2.0) / (2.0 * s * p); }
double pohozaev_target_mass(double s, double p) {
  return 3.0 * (p - 2.0) / (6.0 - (3.0 - 2.0 * s) * p);
}
}  // namespace law

}  // namespace fracsp
