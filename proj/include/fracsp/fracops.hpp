#pragma once

// Fourier-multiplier fractional operators and the free-space Riesz-potential
// (Hartree) term. The Riesz normalization constant c_s is set to 1; every
// Hartree-dependent quantity in the library uses this convention.

#include <vector>

#include "fracsp/grid.hpp"

namespace fracsp {

// (-Delta)^s u as the multiplier |k|^{2s}; the zero mode maps to zero.
Field frac_laplacian(const Field& u, double s);

// ||(-Delta)^{s/2} u||_2^2 = (2L)^-3 sum |k|^{2s} |u_hat|^2.
double seminorm_sq(const Field& u, double s);

// Cell average of |x|^{-(3-2s)} over [-h/2, h/2]^3.
double riesz_cell_average(double h, double s);

// Spectrum of K(x) = |x|^{-(3-2s)} sampled on the 2n-point zero-padded grid,
// so convolutions with it are free-space (no periodic images).
class HartreeKernel {
 public:
  HartreeKernel(const Grid& g, double s);

  const Grid& grid() const { return grid_; }
  double s() const { return s_; }
  double origin_value() const { return origin_; }
  // Kernel sample at integer offset m (in cells); the origin uses the cell average.
  double sample(int mx, int my, int mz) const;
  int padded_n() const { return 2 * grid_.n(); }
  const std::vector<double>& spectrum() const { return spectrum_; }

  // phi(x) = h^3 sum_y K(x - y) rho(y).
  Field convolve(const Field& rho) const;

 private:
  Grid grid_;
  double s_;
  double origin_;
  std::vector<double> spectrum_;  // real part of the padded kernel transform
};

// phi_u = K * u^2.
Field poisson_phi(const Field& u, const HartreeKernel& kernel);

// D(u) = int phi_u u^2.
double hartree_energy(const Field& u, const HartreeKernel& kernel);

// int phi_u v^2 (symmetric in u and v).
double hartree_pair(const Field& u, const Field& v, const HartreeKernel& kernel);

// D(u) / ( seminorm^{(3-2s)/(2s)} * ||u||_2^{4-(3-2s)/s} ). Both sides of the
// HLS + Gagliardo-Nirenberg bound scale identically under u -> c u and under
// dilations, so the ratio is a pure shape functional.
double hls_bound_check(const Field& u, const HartreeKernel& kernel);

}  // namespace fracsp
