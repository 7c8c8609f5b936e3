#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fracsp/grid.hpp"
#include "fracsp/qsolver.hpp"

namespace testing {

// Independent uniform samples in [-1, 1].
inline fracsp::Field random_field(const fracsp::Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  fracsp::Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = d(rng);
  return u;
}

inline fracsp::Field gaussian(const fracsp::Grid& g, double width, double cx = 0.0,
                              double cy = 0.0, double cz = 0.0) {
  return fracsp::sample(g, [&](double x, double y, double z) {
    double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy) + (z - cz) * (z - cz);
    return std::exp(-r2 / (2.0 * width * width));
  });
}

inline double max_abs_diff(const fracsp::Field& a, const fracsp::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Reference profile on (32, 8), solved once per test binary.
inline const fracsp::GroundStateQ& q32() {
  static const fracsp::GroundStateQ q = fracsp::solve_Q(fracsp::Grid(32, 8.0), 0.9, 2.5);
  return q;
}

}  // namespace testing
