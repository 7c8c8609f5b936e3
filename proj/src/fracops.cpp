#include "fracsp/fracops.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fft.hpp"
#include "fracsp/error.hpp"

namespace fracsp {

Field frac_laplacian(const Field& u, double s) {
  return apply_multiplier(u, [s](double k2) { return k2 == 0.0 ? 0.0 : std::pow(k2, s); });
}

double seminorm_sq(const Field& u, double s) {
  Spectrum sp = to_spectral(u);
  double acc = 0.0;
  for_each_mode(u.grid(), [&](std::size_t idx, double kx, double ky, double kz, double w) {
    double k2 = kx * kx + ky * ky + kz * kz;
    if (k2 > 0.0) acc += w * std::pow(k2, s) * std::norm(sp.c[idx]);
  });
  const double box = 2.0 * u.grid().L();
  return acc / (box * box * box);
}

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(std::size_t(n), 0.0);
  w.assign(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[std::size_t(i)] = 0.5 * (1.0 - t);
    w[std::size_t(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

// The cube is six pyramids with apex at the origin; the radial integral is
// exact and the smooth face integral uses Gauss-Legendre quadrature.
double riesz_cell_average(double h, double s) {
  constexpr int nodes = 24;
  const double alpha = 3.0 - 2.0 * s;
  require(alpha < 3.0, "riesz_cell_average requires s > 0");
  std::vector<double> x, w;
  gauss_legendre(nodes, x, w);
  double face = 0.0;  // over [0, 1/2]^2 on the face at distance 1/2
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      double u = 0.5 * x[std::size_t(i)], v = 0.5 * x[std::size_t(j)];
      face += 0.25 * w[std::size_t(i)] * w[std::size_t(j)] * std::pow(0.25 + u * u + v * v, -0.5 * alpha);
    }
  const double unit = 6.0 * 0.5 / (3.0 - alpha) * 4.0 * face;
  return unit * std::pow(h, -alpha);
}

HartreeKernel::HartreeKernel(const Grid& g, double s)
    : grid_(g), s_(s), origin_(riesz_cell_average(g.h(), s)) {
  require(s > 0.0 && s < 1.5, "Riesz kernel requires 0 < s < 3/2");
  const int N = padded_n();
  std::vector<double> k(std::size_t(N) * N * N);
  auto wrap = [N](int j) { return j < N / 2 ? j : j - N; };
  std::size_t idx = 0;
  for (int c = 0; c < N; ++c)
    for (int b = 0; b < N; ++b)
      for (int a = 0; a < N; ++a, ++idx) k[idx] = sample(wrap(a), wrap(b), wrap(c));
  std::vector<std::complex<double>> spec(std::size_t(N) * N * (N / 2 + 1));
  fft::r2c(N, k.data(), spec.data());
  spectrum_.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) spectrum_[i] = spec[i].real();
}

double HartreeKernel::sample(int mx, int my, int mz) const {
  if (mx == 0 && my == 0 && mz == 0) return origin_;
  const double h = grid_.h();
  double r2 = h * h * (double(mx) * mx + double(my) * my + double(mz) * mz);
  return std::pow(r2, -0.5 * (3.0 - 2.0 * s_));
}

Field HartreeKernel::convolve(const Field& rho) const {
  require(rho.grid() == grid_, "grid/kernel mismatch");
  const int n = grid_.n(), N = padded_n();
  // The plane at index 0 is both x = -L and x = +L of the periodic box. Its
  // weight is split evenly between padded positions 0 and n (and gathered
  // back the same way), which keeps the operator symmetric and invariant under
  // reflection through the origin. Offsets of +-n alias onto each other in the
  // 2n padding, harmlessly since the kernel is even.
  struct Slot { int pos[2]; double w[2]; int count; };
  std::vector<Slot> slots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    slots[std::size_t(i)] = i == 0 ? Slot{{0, n}, {0.5, 0.5}, 2} : Slot{{i, 0}, {1.0, 0.0}, 1};
  auto padded = [N](int i, int j, int k) {
    return std::size_t(i) + std::size_t(N) * (std::size_t(j) + std::size_t(N) * k);
  };

  std::vector<double> pad(std::size_t(N) * N * N, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Slot &sx = slots[i], &sy = slots[j], &sz = slots[k];
        const double v = rho(i, j, k);
        for (int c = 0; c < sz.count; ++c)
          for (int b = 0; b < sy.count; ++b)
            for (int a = 0; a < sx.count; ++a)
              pad[padded(sx.pos[a], sy.pos[b], sz.pos[c])] += sx.w[a] * sy.w[b] * sz.w[c] * v;
      }
  std::vector<std::complex<double>> spec(std::size_t(N) * N * (N / 2 + 1));
  fft::r2c(N, pad.data(), spec.data());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= spectrum_[i];
  fft::c2r(N, spec.data(), pad.data());
  const double scale = grid_.cell_volume() / (double(N) * N * N);
  Field out(grid_);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Slot &sx = slots[i], &sy = slots[j], &sz = slots[k];
        double acc = 0.0;
        for (int c = 0; c < sz.count; ++c)
          for (int b = 0; b < sy.count; ++b)
            for (int a = 0; a < sx.count; ++a)
              acc += sx.w[a] * sy.w[b] * sz.w[c] * pad[padded(sx.pos[a], sy.pos[b], sz.pos[c])];
        out(i, j, k) = scale * acc;
      }
  return out;
}

Field poisson_phi(const Field& u, const HartreeKernel& kernel) {
  return kernel.convolve(hadamard(u, u));
}

double hartree_energy(const Field& u, const HartreeKernel& kernel) {
  return hartree_pair(u, u, kernel);
}

double hartree_pair(const Field& u, const Field& v, const HartreeKernel& kernel) {
  Field phi = poisson_phi(u, kernel);
  return inner(phi, hadamard(v, v));
}

double hls_bound_check(const Field& u, const HartreeKernel& kernel) {
  const double s = kernel.s();
  double mass = norm_l2sq(u);
  require(mass > 0.0, "hls_bound_check: zero field");
  double d = hartree_energy(u, kernel);
  double sem = seminorm_sq(u, s);
  double rhs = std::pow(sem, (3.0 - 2.0 * s) / (2.0 * s)) *
               std::pow(mass, 0.5 * (4.0 - (3.0 - 2.0 * s) / s));
  return d / rhs;
}

}  // namespace fracsp
