#include <cmath>

#include "doctest.h"
#include "fracsp/energy.hpp"
#include "fracsp/error.hpp"
#include "fracsp/minimizer.hpp"
#include "helpers.hpp"

using namespace fracsp;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const Variant kVariants[] = {Variant::full, Variant::V0, Variant::Vinf, Variant::tilde};

}  // namespace

TEST_CASE("parameter admissibility") {
  CHECK_NOTHROW(Params{0.9, 2.5, 1.0, 1.0}.validate());
  // 2 + 4s/3 = 3.2 at s = 0.9
  CHECK_THROWS_WITH_AS(Params({0.9, 3.3, 1.0, 1.0}).validate(),
                       doctest::Contains("2 + 4s/3 = 3.2"), Error);
  CHECK_THROWS_AS(Params({0.9, 2.0, 1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(Params({0.5, 2.3, 1.0, 1.0}).validate(), Error);
  CHECK_NOTHROW(Params({0.5, 2.3, 1.0, 1.0}).validate(true));
  CHECK_THROWS_AS(Params({0.9, 2.5, 0.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(Params({0.9, 2.5, 1.0, -1.0}).validate(), Error);
}

TEST_CASE("law exponents and constants at s = 0.9, p = 2.5") {
  CHECK(law::energy_exponent(0.9, 2.5) == Approx(1.8 / 2.1).epsilon(1e-14));
  CHECK(law::energy_exponent(0.9, 2.5) == Approx(0.857143).epsilon(1e-6));
  CHECK(law::energy_constant(0.9, 2.5) == Approx(-0.7).epsilon(1e-14));
  CHECK(law::eps_exponent(0.9, 2.5) == Approx(1.0 / -2.1).epsilon(1e-14));
  CHECK(law::pohozaev_target_power(0.9, 2.5) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(law::pohozaev_target_mass(0.9, 2.5) == Approx(0.5).epsilon(1e-14));
  CHECK(law::blowup_scale(4.0, 4.0, 0.9, 2.5) ==
        Approx(std::pow(2.0, 1.0 / -2.1)).epsilon(1e-14));
}

TEST_CASE("GN constant arithmetic") {
  // prefactor 1.5, inner ratio 2, exponent 5/12
  const double a_star = 7.3;
  double c = gn_constant(0.9, 2.5, a_star);
  CHECK(c == Approx(1.5 * std::pow(2.0, 5.0 / 12.0) / std::pow(a_star, 0.25)).epsilon(1e-14));
  CHECK(gn_constant(0.9, 2.5, 2.0) * std::pow(2.0, 0.25) ==
        Approx(gn_constant(0.9, 2.5, 50.0) * std::pow(50.0, 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(gn_constant(0.9, 2.5, 0.0), Error);
}

TEST_CASE("energy of the zero field and the breakdown identity") {
  Grid g(16, 4.0);
  Potential v = make_single_well({0, 0, 0}, 2.0, 1.0);
  EnergyModel model(g, v, {0.9, 2.5, 3.0, 1.0});
  for (Variant var : kVariants) {
    EnergyBreakdown e = model.energy(Field(g), var);
    CHECK(e.total == 0.0);
    CHECK(e.kinetic == 0.0);
    CHECK(model.gradient(Field(g), var).max_abs() == 0.0);
    Field u = testing::random_field(g, 4);
    e = model.energy(u, var);
    CHECK(rel(e.total, e.kinetic + e.potential_term - e.hartree - e.power) < 1e-12);
  }
  Field u = testing::random_field(g, 4);
  EnergyBreakdown t = model.energy(u, Variant::tilde);
  CHECK(t.hartree == 0.0);
  CHECK(t.potential_term == 0.0);
}

TEST_CASE("V0 energy and multiplier are translation invariant") {
  // The Hartree term is free-space, so the field must not reach the box edge.
  Grid g(24, 6.0);
  Potential v = make_single_well({0, 0, 0}, 2.0, 1.0);
  EnergyModel model(g, v, {0.9, 2.5, 2.0, 1.0});
  Field u = project_mass(testing::gaussian(g, 0.6, 0.5, 0, 0), 1.0);
  Field s = shift(u, {3, -2, 1});
  CHECK(rel(model.energy(s, Variant::V0).total, model.energy(u, Variant::V0).total) < 1e-12);
  CHECK(rel(multiplier(s, model, Variant::V0), multiplier(u, model, Variant::V0)) < 1e-12);
  CHECK(rel(model.energy(s, Variant::full).total, model.energy(u, Variant::full).total) > 1e-6);
}

TEST_CASE("tilde energy terms scale with the dilation exponents") {
  // The periodic images of the nonlocal kinetic term decay algebraically,
  // so the box is large compared with the profiles.
  Grid g(96, 16.0);
  const double s = 0.9, p = 2.5;
  EnergyModel model(g, make_zero_potential(), {s, p, 1.0, 1.0}, false);
  auto dilated = [&](double t) {
    return sample(g, [&](double x, double y, double z) {
      return std::pow(t, 1.5) * std::exp(-t * t * (x * x + y * y + z * z) / 2.0);
    });
  };
  EnergyBreakdown e1 = model.energy(dilated(1.0), Variant::tilde);
  EnergyBreakdown e2 = model.energy(dilated(2.0), Variant::tilde);
  CHECK(std::log2(e2.kinetic / e1.kinetic) == Approx(2 * s).epsilon(1e-5));
  CHECK(std::log2(e2.power / e1.power) == Approx(1.5 * (p - 2)).epsilon(1e-5));
}

TEST_CASE("gradient matches central differences for every variant") {
  Grid g(16, 4.0);
  Potential v = make_single_well({0.3, 0, 0}, 2.0, 1.5);
  EnergyModel model(g, v, {0.9, 2.5, 3.0, 1.0});
  for (Variant var : kVariants)
    for (std::uint64_t k = 0; k < 3; ++k) {
      Field u = random_smooth_field(g, 100 + 2 * k), w = random_smooth_field(g, 101 + 2 * k);
      CHECK(gradient_fd_error(model, u, w, var) < 1e-5);
    }
}

TEST_CASE("tilde gradient drops the potential and Hartree terms") {
  Grid g(16, 4.0);
  const Params prm{0.9, 2.5, 3.0, 1.0};
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), prm);
  Field u = random_smooth_field(g, 9);
  Field expect = frac_laplacian(u, prm.s);
  for (std::size_t i = 0; i < u.size(); ++i)
    expect[i] -= std::pow(prm.a, prm.p - 2) * std::copysign(std::pow(std::abs(u[i]), prm.p - 1), u[i]);
  CHECK(testing::max_abs_diff(model.gradient(u, Variant::tilde), expect) <
        1e-12 * expect.max_abs());
}

TEST_CASE("free functions agree with the model") {
  Grid g(16, 4.0);
  Potential v = make_single_well({0, 0, 0}, 2.0, 1.0);
  const Params prm{0.9, 2.5, 2.0, 1.0};
  EnergyModel model(g, v, prm);
  Field u = random_smooth_field(g, 3);
  CHECK(energy(u, v, prm, Variant::full).total == model.energy(u, Variant::full).total);
  CHECK(testing::max_abs_diff(gradient(u, v, prm, Variant::Vinf),
                              model.gradient(u, Variant::Vinf)) == 0.0);
}

TEST_CASE("E(u) >= E(|u|) on sign-changing fields") {
  Grid g(16, 4.0);
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), {0.9, 2.5, 2.0, 1.0});
  for (std::uint64_t k = 0; k < 10; ++k) {
    Field u = project_mass(random_smooth_field(g, 500 + k), 1.0);
    Field a = u;
    for (double& x : a.data()) x = std::abs(x);
    double eu = model.energy(u, Variant::full).total, ea = model.energy(a, Variant::full).total;
    CHECK(eu >= ea - 1e-8 * std::abs(eu));
  }
}

TEST_CASE("variant ordering for 0 <= V <= V_inf") {
  Grid g(16, 4.0);
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), {0.9, 2.5, 2.0, 1.0});
  for (std::uint64_t k = 0; k < 10; ++k) {
    Field u = project_mass(random_smooth_field(g, 700 + k), 1.0);
    double vinf = model.energy(u, Variant::Vinf).total;
    double full = model.energy(u, Variant::full).total;
    double v0 = model.energy(u, Variant::V0).total;
    CHECK(vinf >= full);
    CHECK(full >= v0);
  }
}

TEST_CASE("multiplier requires the mass constraint") {
  Grid g(16, 4.0);
  EnergyModel model(g, make_zero_potential(), {0.9, 2.5, 1.0, 1.0});
  Field u = testing::gaussian(g, 1.0);
  CHECK_THROWS_AS(multiplier(u, model), Error);
  Field w = project_mass(u, 1.0);
  CHECK_NOTHROW(multiplier(w, model));
}

TEST_CASE("EL residual of a random field is order one") {
  Grid g(16, 4.0);
  EnergyModel model(g, make_single_well({0, 0, 0}, 2.0, 1.0), {0.9, 2.5, 1.0, 1.0});
  Field u = project_mass(testing::random_field(g, 3), 1.0);
  double r = el_residual(u, model, multiplier(u, model));
  CHECK(r > 0.1);
}

TEST_CASE("GN ratio stays below the sharp constant away from Q") {
  const auto& q = testing::q32();
  const double c = gn_constant(0.9, 2.5, q.a_star);
  CHECK(rel(gn_ratio(q.Q, 0.9, 2.5), c) < 0.02);
  const Grid& g = q.Q.grid();
  // Uniform noise sits far below the optimum.
  for (std::uint64_t k = 0; k < 50; ++k) CHECK(gn_ratio(testing::random_field(g, 900 + k), 0.9, 2.5) < c / 5);
  // Smooth bump superpositions come closer but stay below.
  for (std::uint64_t k = 0; k < 20; ++k) CHECK(gn_ratio(random_smooth_field(g, 950 + k), 0.9, 2.5) < c);
}

TEST_CASE("variant names round trip") {
  for (Variant v : kVariants) CHECK(variant_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(variant_from_string("nope"), Error);
}
