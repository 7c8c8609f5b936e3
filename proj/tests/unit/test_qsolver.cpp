#include <cmath>

#include "doctest.h"
#include "fracsp/energy.hpp"
#include "fracsp/error.hpp"
#include "fracsp/qsolver.hpp"
#include "helpers.hpp"

using namespace fracsp;
using doctest::Approx;

namespace {

constexpr double s = 0.9, p = 2.5;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const GroundStateQ& q64() {
  static const GroundStateQ q = solve_Q(Grid(64, 16.0), s, p, 1e-10, 200);
  return q;
}

}  // namespace

TEST_CASE("Q converges from a Gaussian seed in under 200 iterations") {
  const GroundStateQ& q = q64();
  CHECK(q.iterations < 200);
  CHECK(std::abs(q.stabilizer - 1.0) < 1e-10);
  CHECK(q.relative_residual() < 1e-6);
  CHECK(q.a_star == Approx(norm_l2sq(q.Q)).epsilon(1e-15));
  CHECK(rel(q_residual(q.Q, s, p), q.relative_residual()) < 1e-12);
}

TEST_CASE("Q is positive, centred and nonincreasing along the axes") {
  const GroundStateQ& q = q64();
  const Grid& g = q.Q.grid();
  const int c = g.n() / 2;
  double mn = q.Q[0];
  for (double x : q.Q.values()) mn = std::min(mn, x);
  CHECK(mn > 0.0);
  CHECK(q.Q.argmax() == g.index(c, c, c));
  bool monotone = true;
  for (int d = 0; d < c - 1; ++d) {
    monotone &= q.Q(c + d + 1, c, c) <= q.Q(c + d, c, c) + 1e-10;
    monotone &= q.Q(c - d - 1, c, c) <= q.Q(c - d, c, c) + 1e-10;
    monotone &= q.Q(c, c + d + 1, c) <= q.Q(c, c + d, c) + 1e-10;
    monotone &= q.Q(c, c, c - d - 1) <= q.Q(c, c, c - d) + 1e-10;
  }
  CHECK(monotone);
}

TEST_CASE("Q is a fixed point of the iteration") {
  const GroundStateQ& q = q64();
  GroundStateQ again = solve_Q(q.Q.grid(), s, p, 1e-10, 5, q.Q);
  CHECK(again.iterations <= 2);
  CHECK(testing::max_abs_diff(again.Q, q.Q) < 1e-8 * q.Q.max_abs());
}

TEST_CASE("different seeds give the same profile after recentering") {
  Grid g(32, 8.0);
  GroundStateQ a = solve_Q(g, s, p);
  GroundStateQ b = solve_Q(g, s, p, 1e-10, 500, testing::gaussian(g, 1.6, 1.0, -0.5, 0.5));
  CHECK(testing::max_abs_diff(a.Q, b.Q) < 1e-6);
}

TEST_CASE("solve_Q reports divergence and non-convergence") {
  Grid g(16, 4.0);
  CHECK_THROWS_WITH_AS(solve_Q(g, s, p, 1e-10, 2), doctest::Contains("did not converge"), Error);
  CHECK_THROWS_WITH_AS(solve_Q(g, s, p, 1e-10, 50, Field(g)), doctest::Contains("diverged"),
                       Error);
  CHECK_THROWS_AS(solve_Q(g, s, p, 0.0), Error);
}

TEST_CASE("Pohozaev ratios") {
  const GroundStateQ& q = q64();
  CHECK(rel(q.pohozaev_ratios[0], 1.0 / 3.0) < 0.02);
  CHECK(rel(q.pohozaev_ratios[1], 0.5) < 0.02);
  auto shifted = pohozaev_check(shift(q.Q, {3, -1, 2}), s, p);
  CHECK(rel(shifted[0], q.pohozaev_ratios[0]) < 1e-12);
  CHECK(rel(shifted[1], q.pohozaev_ratios[1]) < 1e-12);
}

TEST_CASE("GN equality at Q") {
  const GroundStateQ& q = q64();
  CHECK(rel(gn_ratio(q.Q, s, p), gn_constant(s, p, q.a_star)) < 0.02);
}

TEST_CASE("critical mass is stable under refinement") {
  GroundStateQ q48 = solve_Q(Grid(48, 16.0), s, p);
  CHECK(rel(q48.a_star, q64().a_star) < 0.01);
}

TEST_CASE("decay fit on synthetic profiles") {
  Grid g(64, 16.0);
  Field power = sample(g, [](double x, double y, double z) {
    return 1.0 / (1.0 + std::pow(x * x + y * y + z * z, 2.4));
  });
  DecayFit f = decay_fit(power);
  CHECK(rel(f.exponent, 4.8) < 0.01);
  CHECK(f.power_law);
  Field gauss = testing::gaussian(g, 3.0);
  DecayFit fg = decay_fit(gauss);
  CHECK(fg.r_squared < 0.99);
  CHECK_FALSE(fg.power_law);
  Field neg = -1.0 * power;
  CHECK_THROWS_AS(decay_fit(neg), Error);
}

TEST_CASE("linearized operator: kernel, pseudo-eigenvector and gap") {
  const GroundStateQ& q = q64();
  KernelCheck kc = linearized_kernel_check(q.Q, s, p);
  for (double r : kc.kernel_residuals) CHECK(r < 5e-2);
  CHECK(kc.pseudo_eigen_error < 5e-2);
  const double worst = std::max({kc.kernel_residuals[0], kc.kernel_residuals[1],
                                 kc.kernel_residuals[2]});
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Field v = testing::random_field(q.Q.grid(), seed);
    CHECK(linearized_gap_probe(q.Q, s, p, v) > 10.0 * worst);
  }
}

TEST_CASE("linearized operator annihilates translations of Q by construction") {
  const GroundStateQ& q = q64();
  Field dq = derivative(q.Q, 0);
  Field l = linearized_apply(q.Q, s, p, dq);
  CHECK(std::sqrt(norm_l2sq(l) / norm_l2sq(dq)) < 5e-2);
}

TEST_CASE("virial identity") {
  const GroundStateQ& q = q64();
  CHECK(virial_check(q.Q, s) < 0.02);
  Grid g(64, 16.0);
  CHECK(virial_check(testing::gaussian(g, 1.5), s) < 0.01);
  Field mode = sample(g, [&](double x, double, double) {
    return 1.0 + 0.5 * std::cos(3.14159265358979 / g.L() * x);
  });
  CHECK_THROWS_AS(virial_check(mode, s), Error);
}
