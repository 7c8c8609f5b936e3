#pragma once

// Uniform periodic grid on [-L, L)^3 and real fields sampled on it.
//
// Sample order is row-major with x fastest: index = i + n*(j + n*k) where
// i, j, k are the x, y, z indices. Coordinates are x_i = -L + i*h, h = 2L/n,
// so the origin sits at index n/2 on every axis.
//
// Fourier convention (used everywhere in the library):
//   forward   u_hat(k) = h^3 * sum_x u(x) exp(-i k.x)
//   inverse   u(x)     = (2L)^-3 * sum_k u_hat(k) exp(i k.x)
// with angular wavenumbers k = (pi/L) m, m in [-n/2, n/2). With this pair
// ||u||_2^2 = h^3 sum |u|^2 = (2L)^-3 sum |u_hat|^2.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracsp {

class Grid {
 public:
  Grid(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  double h() const { return 2.0 * L_ / n_; }
  double cell_volume() const { double hh = h(); return hh * hh * hh; }
  std::size_t size() const { return std::size_t(n_) * n_ * n_; }
  // Modes stored by the real-to-complex transform (x axis halved).
  int nx_half() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return std::size_t(n_) * n_ * nx_half(); }

  double coord(int j) const { return -L_ + j * h(); }
  // Signed integer mode for FFT storage index j, in [-n/2, n/2).
  int mode(int j) const { return j < n_ / 2 ? j : j - n_; }
  double wavenumber(int j) const;
  std::vector<double> k_table() const;
  double max_wavenumber() const;

  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n_) * (std::size_t(j) + std::size_t(n_) * k);
  }
  std::array<int, 3> unravel(std::size_t idx) const {
    int i = int(idx % n_);
    int j = int((idx / n_) % n_);
    int k = int(idx / (std::size_t(n_) * n_));
    return {i, j, k};
  }
  std::array<double, 3> point(std::size_t idx) const {
    auto [i, j, k] = unravel(idx);
    return {coord(i), coord(j), coord(k)};
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_ && a.L_ == b.L_; }

 private:
  int n_;
  double L_;
};

Grid make_grid(int n, double L);

class Field {
 public:
  explicit Field(const Grid& g) : grid_(g), v_(g.size(), 0.0) {}
  Field(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator()(int i, int j, int k) { return v_[grid_.index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[grid_.index(i, j, k)]; }

  bool all_finite() const;
  double max_abs() const;
  std::size_t argmax() const;  // lowest index among equal maxima

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);

 private:
  Grid grid_;
  std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);
// Pointwise product.
Field hadamard(const Field& a, const Field& b);

// Samples f(x, y, z) at every grid point.
template <class F>
Field sample(const Grid& g, F&& f) {
  Field out(g);
  for (int k = 0; k < g.n(); ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) out(i, j, k) = f(g.coord(i), g.coord(j), g.coord(k));
  return out;
}

struct Spectrum {
  Grid grid;
  std::vector<std::complex<double>> c;  // layout (kz, ky, kx_half), kx fastest
};

Spectrum to_spectral(const Field& u);
Field from_spectral(const Spectrum& s);

// Visits every stored mode with (storage index, kx, ky, kz, hermitian weight).
// The weight counts the conjugate partner not stored by the half spectrum, so
// sum_k f(k) |u_hat(k)|^2 over the full spectrum equals the weighted sum here.
template <class F>
void for_each_mode(const Grid& g, F&& f) {
  const int n = g.n(), nh = g.nx_half();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k) {
    double kz = g.wavenumber(k);
    for (int j = 0; j < n; ++j) {
      double ky = g.wavenumber(j);
      for (int i = 0; i < nh; ++i, ++idx) {
        double kx = g.wavenumber(i);
        double w = (i == 0 || i == n / 2) ? 1.0 : 2.0;
        f(idx, kx, ky, kz, w);
      }
    }
  }
}

// Applies a real radial multiplier m(|k|) in spectral space.
template <class M>
Field apply_multiplier(const Field& u, M&& m) {
  Spectrum s = to_spectral(u);
  for_each_mode(u.grid(), [&](std::size_t idx, double kx, double ky, double kz, double) {
    s.c[idx] *= m(kx * kx + ky * ky + kz * kz);
  });
  return from_spectral(s);
}

double inner(const Field& u, const Field& v);
double norm_l2sq(const Field& u);
double norm_l2sq_spectral(const Field& u);
double norm_lp(const Field& u, double q);
double integral(const Field& u);

// Cyclic shift: out(x + offset*h) = u(x).
Field shift(const Field& u, std::array<int, 3> offset);
// Cyclic shift that moves the global maximum to the origin cell.
Field recenter(const Field& u);

// Trilinear interpolation at an arbitrary point; zero outside [-L, L - h].
double trilinear(const Field& u, double x, double y, double z);
// Trilinear interpolation of the periodic extension of u.
double trilinear_periodic(const Field& u, double x, double y, double z);

// Spectral partial derivative along axis (0 = x). Nyquist modes are dropped.
Field derivative(const Field& u, int axis);
// x . grad u with spectral gradient and physical-space coordinates.
Field radial_derivative(const Field& u);

}  // namespace fracsp
