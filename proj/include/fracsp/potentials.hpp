#pragma once

// External potentials bounded by V_inf with isolated zeros (wells), each
// almost homogeneous of some degree, plus the landscape quantities
// H_i(y) = int V_i(x + y) Q(x)^2 dx built from the homogeneous local models
// V_i(z) = c_i |z|^{r_i}.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracsp/grid.hpp"

namespace fracsp {

using Vec3 = std::array<double, 3>;

struct Well {
  Vec3 x;        // location of the zero
  double r;      // homogeneity degree
  double c;      // local coefficient: V(x + z) ~ c |z|^r
};

enum class PotentialKind { zero, constant, single_well, multi_well, custom_table };

std::string to_string(PotentialKind k);
PotentialKind potential_kind_from_string(const std::string& s);

class Potential {
 public:
  PotentialKind kind() const { return kind_; }
  double V_inf() const { return v_inf_; }
  const std::vector<Well>& wells() const { return wells_; }

  double operator()(const Vec3& x) const;
  Field on_grid(const Grid& g) const;
  // Homogeneous local model of well i at offset z.
  double local_model(std::size_t i, const Vec3& z) const;

  friend Potential make_zero_potential();
  friend Potential make_constant_potential(double value);
  friend Potential make_single_well(const Vec3& x0, double r, double V_inf);
  friend Potential make_multi_well(const std::vector<std::pair<Vec3, double>>& wells,
                                   double V_inf, double box_half_width);
  friend Potential make_custom_table(const Field& values, std::vector<Well> wells);

 private:
  PotentialKind kind_ = PotentialKind::zero;
  double v_inf_ = 0.0;
  std::vector<Well> wells_;
  std::optional<Field> table_;
};

Potential make_zero_potential();
Potential make_constant_potential(double value);
// V(x) = V_inf |x - x0|^r / (1 + |x - x0|^r).
Potential make_single_well(const Vec3& x0, double r, double V_inf);
// V = V_inf f / (1 + f), f(x) = prod_i |x - x_i|^{r_i}. Wells must be distinct
// and at least box_half_width/4 inside [-L, L]^3.
Potential make_multi_well(const std::vector<std::pair<Vec3, double>>& wells, double V_inf,
                          double box_half_width);
// Grid samples supplied by the caller; evaluation is only defined on that grid.
Potential make_custom_table(const Field& values, std::vector<Well> wells);

// Throws if a well lies closer than L/4 to the boundary of grid g.
void check_wells_inside(const Potential& pot, const Grid& g);

// Ratios V(x_i + z) / (c_i |z|^{r_i}) along +x at radii {4h, 2h, h}.
std::array<double, 3> local_model_ratios(const Potential& pot, std::size_t well, double h);

// Least-squares fit of log V against log |z| near a well along the six axis
// directions, radii in [rmin, rmax]. Returns {degree, coefficient}.
std::pair<double, double> fit_local_model(const Potential& pot, std::size_t well, double rmin,
                                          double rmax);

// H_i(y) by quadrature against Q^2 (Q normalized so ||Q||_2^2 = a_star).
double compute_H(const Potential& pot, std::size_t well, const Vec3& y, const Field& Q,
                 double a_star);

struct WellLandscape {
  std::size_t well;
  double lambda_bar = 0.0;   // min_y H_i(y)
  Vec3 y0{};                 // minimizer of H_i
  std::array<std::array<double, 3>, 3> hessian{};
  double hessian_min_eig = 0.0;
  std::vector<Vec3> minimizers;  // distinct refined minimizers (K_0 candidates)
  bool converged = true;
};

struct LandscapeReport {
  double r = 0.0;                  // max degree
  std::vector<std::size_t> zbar;   // wells attaining r
  std::vector<WellLandscape> per_well;  // one entry per well in zbar (the set Lambda)
  double lambda_bar_0 = 0.0;
  std::vector<std::size_t> z0;     // wells in zbar attaining lambda_bar_0
  bool nondegenerate = false;      // every Z0 member has a unique y0 with PD Hessian
  bool satisfies_v3 = false;       // |Z0| = 1 and nondegenerate
  bool converged = true;

  const WellLandscape* find(std::size_t well) const;
};

LandscapeReport analyze_landscape(const Potential& pot, const Field& Q, double a_star);

}  // namespace fracsp
