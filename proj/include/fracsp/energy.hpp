#pragma once

// Energy functionals on the mass sphere S_m = { ||u||_2^2 = m }:
//
//   E_a(u) = ||(-Delta)^{s/2} u||^2 + int V u^2 - D(u)/2 - (2 a^{p-2} / p) int |u|^p
//
// with D(u) the Hartree double integral. Variants replace V by 0 (V0) or by
// V_inf (Vinf), or drop both V and D (tilde).

#include <cstdint>
#include <memory>
#include <string>

#include "fracsp/fracops.hpp"
#include "fracsp/potentials.hpp"

namespace fracsp {

struct Params {
  double s = 0.9;
  double p = 2.5;
  double a = 1.0;
  double m = 1.0;

  // Throws listing every violated constraint. allow_any_s lifts the
  // s in (3/4, 1) requirement for diagnostics.
  void validate(bool allow_any_s = false) const;
};

enum class Variant { full, V0, Vinf, tilde };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct EnergyBreakdown {
  double kinetic = 0.0;         // ||(-Delta)^{s/2} u||^2
  double potential_term = 0.0;  // int V u^2
  double hartree = 0.0;         // D(u) / 2, enters with a minus sign
  double power = 0.0;           // (2 a^{p-2} / p) int |u|^p, enters with a minus sign
  double total = 0.0;
};

// Everything needed to evaluate functionals on one grid. Pass
// with_hartree = false when only the tilde variant will be evaluated.
class EnergyModel {
 public:
  EnergyModel(const Grid& g, const Potential& pot, const Params& prm, bool with_hartree = true);

  const Grid& grid() const { return grid_; }
  const Params& params() const { return prm_; }
  const Potential& potential() const { return pot_; }
  const Field& potential_samples() const { return v_; }
  const HartreeKernel& kernel() const;

  EnergyBreakdown energy(const Field& u, Variant variant) const;
  // Half the Frechet derivative of E:
  //   g = (-Delta)^s u + V u - phi_u u - a^{p-2} |u|^{p-2} u,
  // so critical points on S_m satisfy g = mu u.
  Field gradient(const Field& u, Variant variant) const;

  // Energy and gradient sharing the Poisson solve.
  EnergyBreakdown energy_and_gradient(const Field& u, Variant variant, Field& grad) const;

 private:
  Grid grid_;
  Potential pot_;
  Params prm_;
  Field v_;
  std::shared_ptr<const HartreeKernel> kernel_;
};

EnergyBreakdown energy(const Field& u, const Potential& pot, const Params& prm, Variant variant);
Field gradient(const Field& u, const Potential& pot, const Params& prm, Variant variant);

// mu = <g, u> / m, requiring ||u||_2^2 = m to 1e-8 relative.
double multiplier(const Field& u, const EnergyModel& model, Variant variant = Variant::full);
// mu from E(u) - D(u)/2 - ((p-2)/p) a^{p-2} int |u|^p, divided by m.
double multiplier_from_energy(const Field& u, const EnergyModel& model,
                              Variant variant = Variant::full);

// ||g - mu u||_2 / ||u||_2.
double el_residual(const Field& u, const EnergyModel& model, double mu,
                   Variant variant = Variant::full);

// |<g, v> - D| / max(|<g, v>|, |D|) with the central difference
// D = (E(u + t v) - E(u - t v)) / (4 t); the 4 accounts for g being half the
// derivative.
double gradient_fd_error(const EnergyModel& model, const Field& u, const Field& v,
                         Variant variant, double t = 1e-5);

// Sum of six Gaussian bumps with random centres in [-L/2, L/2]^3, widths in
// [L/16, L/6] and amplitudes in [-1, 1], from a 64-bit seed.
Field random_smooth_field(const Grid& g, std::uint64_t seed);

// Sharp Gagliardo-Nirenberg constant from the critical mass a* = ||Q||_2^2.
double gn_constant(double s, double p, double a_star);
// int |u|^p / ( seminorm^{3(p-2)/(4s)} ||u||_2^{p - 3(p-2)/(2s)} ).
double gn_ratio(const Field& u, double s, double p);

// Exponents and constants of the problem.
namespace law {
// 4s(p-2) / (4s + 6 - 3p): growth exponent of e_1(a).
double energy_exponent(double s, double p);
// (3p - 6 - 4s) / (6 - (3-2s) p): limit constant of the normalized energy.
double energy_constant(double s, double p);
// (2p - 4) / (3p - 6 - 4s): blow-up scale exponent, eps = (a / sqrt(a*))^this.
double eps_exponent(double s, double p);
double blowup_scale(double a, double a_star, double s, double p);
// Pohozaev targets for Q: seminorm / int Q^p and seminorm / int Q^2.
double pohozaev_target_power(double s, double p);
double pohozaev_target_mass(double s, double p);
}  // namespace law

}  // namespace fracsp
