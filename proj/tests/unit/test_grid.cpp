#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracsp/error.hpp"
#include "fracsp/grid.hpp"
#include "helpers.hpp"

using namespace fracsp;
using doctest::Approx;

TEST_CASE("grid coordinates and spacing") {
  Grid g = make_grid(8, 4.0);
  CHECK(g.h() == 1.0);
  for (int j = 0; j < 8; ++j) CHECK(g.coord(j) == -4.0 + j);
  double kmax = 0.0;
  for (double k : g.k_table()) kmax = std::max(kmax, std::abs(k));
  CHECK(kmax == Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(g.max_wavenumber() == Approx(std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("grid rejects invalid sizes") {
  CHECK_THROWS_WITH_AS(make_grid(7, 4.0), "n must be even", Error);
  CHECK_THROWS_AS(make_grid(6, 4.0), Error);
  CHECK_THROWS_AS(make_grid(8, 0.0), Error);
  CHECK_THROWS_AS(make_grid(8, -1.0), Error);
}

TEST_CASE("origin sits at index n/2") {
  Grid g(16, 3.0);
  CHECK(g.coord(8) == 0.0);
  auto p = g.point(g.index(8, 8, 8));
  CHECK(p == std::array<double, 3>{0.0, 0.0, 0.0});
}

TEST_CASE("L2 norm of simple fields") {
  Grid g(8, 4.0);
  Field one = sample(g, [](double, double, double) { return 1.0; });
  CHECK(norm_l2sq(one) == Approx(512.0).epsilon(1e-15));
  CHECK(norm_l2sq(Field(g)) == 0.0);
  // cos(k1 x) integrates to half the box volume.
  const double k1 = std::numbers::pi / g.L();
  Field c = sample(g, [&](double x, double, double) { return std::cos(k1 * x); });
  CHECK(norm_l2sq(c) == Approx(256.0).epsilon(1e-13));
  CHECK(norm_l2sq_spectral(c) == Approx(256.0).epsilon(1e-13));
}

TEST_CASE("Lp norms") {
  Grid g(8, 4.0);
  Field one = sample(g, [](double, double, double) { return 1.0; });
  CHECK(norm_lp(one, 2.0) == Approx(std::sqrt(512.0)).epsilon(1e-15));
  Field two = 2.0 * one;
  CHECK(norm_lp(two, 3.0) == Approx(std::cbrt(8.0 * 512.0)).epsilon(1e-14));

  // Gaussian moment: int exp(-3|x|^2/2) = (2 pi / 3)^{3/2}.
  Grid h(64, 8.0);
  Field gs = testing::gaussian(h, 1.0);
  double exact = std::cbrt(std::pow(2.0 * std::numbers::pi / 3.0, 1.5));
  CHECK(std::abs(norm_lp(gs, 3.0) - exact) / exact < 1e-6);
}

TEST_CASE("shift is a permutation") {
  Grid g(16, 2.0);
  Field u = testing::random_field(g, 11);
  CHECK(shift(u, {0, 0, 0}).data() == u.data());
  Field back = shift(shift(u, {3, -5, 7}), {-3, 5, -7});
  CHECK(back.data() == u.data());
  Field s = shift(u, {1, 2, 3});
  std::vector<double> a = u.data(), b = s.data();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  for (double q : {2.0, 2.5, 12.0 / 4.8}) CHECK(norm_lp(s, q) == Approx(norm_lp(u, q)).epsilon(1e-14));
  // out(x + offset h) = u(x)
  CHECK(s(4, 5, 6) == u(3, 3, 3));
}

TEST_CASE("spectral round trip and Plancherel") {
  Grid g(16, 3.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Field u = testing::random_field(g, seed);
    double l2 = norm_l2sq(u);
    REQUIRE(std::abs(norm_l2sq_spectral(u) - l2) / l2 < 1e-12);
    if (seed <= 5) {
      Field back = from_spectral(to_spectral(u));
      CHECK(testing::max_abs_diff(back, u) / u.max_abs() < 1e-12);
    }
  }
}

TEST_CASE("impulse has a flat spectrum") {
  Grid g(8, 2.0);
  Field d(g);
  d(3, 5, 1) = 1.0;
  Spectrum s = to_spectral(d);
  for (const auto& c : s.c) CHECK(std::abs(c) == Approx(g.cell_volume()).epsilon(1e-13));
}

TEST_CASE("recenter moves the maximum to the origin cell") {
  Grid g(16, 4.0);
  Field u = testing::gaussian(g, 0.7, 1.5, -2.0, 0.5);
  Field r = recenter(u);
  CHECK(r.argmax() == g.index(8, 8, 8));
  CHECK(r.max_abs() == u.max_abs());
}

TEST_CASE("trilinear interpolation") {
  Grid g(16, 4.0);
  Field lin = sample(g, [](double x, double y, double z) { return 1.0 + 2 * x - y + 0.5 * z; });
  // Exact for affine functions inside the box.
  CHECK(trilinear(lin, 0.3, -1.7, 2.2) == Approx(1.0 + 0.6 + 1.7 + 1.1).epsilon(1e-13));
  Field u = testing::random_field(g, 5);
  CHECK(trilinear_periodic(u, g.coord(3), g.coord(9), g.coord(12)) == u(3, 9, 12));
  // Periodic wrap: x = L is the plane x = -L.
  CHECK(trilinear_periodic(u, 4.0, g.coord(2), g.coord(2)) == Approx(u(0, 2, 2)));
  CHECK(trilinear_periodic(u, 4.0 - 0.25, g.coord(2), g.coord(2)) ==
        Approx(0.5 * (u(15, 2, 2) + u(0, 2, 2))));
}

TEST_CASE("spectral derivative of a resolved Gaussian") {
  Grid g(48, 8.0);
  Field u = testing::gaussian(g, 1.0);
  Field dx = derivative(u, 0);
  Field exact = sample(g, [](double x, double y, double z) {
    return -x * std::exp(-(x * x + y * y + z * z) / 2.0);
  });
  CHECK(testing::max_abs_diff(dx, exact) < 1e-8);
}
