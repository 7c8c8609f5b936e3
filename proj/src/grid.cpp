#include "fracsp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "fracsp/error.hpp"

namespace fracsp {

Grid::Grid(int n, double L) : n_(n), L_(L) {
  require(n % 2 == 0, "n must be even");
  require(n >= 8, "n must be at least 8");
  require(L > 0.0 && std::isfinite(L), "L must be positive");
}

Grid make_grid(int n, double L) { return Grid(n, L); }

double Grid::wavenumber(int j) const { return std::numbers::pi / L_ * mode(j); }

std::vector<double> Grid::k_table() const {
  std::vector<double> k(n_);
  for (int j = 0; j < n_; ++j) k[j] = wavenumber(j);
  return k;
}

double Grid::max_wavenumber() const { return std::numbers::pi / L_ * (n_ / 2); }

Field::Field(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  require(v_.size() == g.size(), "field size does not match grid");
}

bool Field::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

std::size_t Field::argmax() const {
  // std::max_element returns the first of equal maxima.
  return std::size_t(std::max_element(v_.begin(), v_.end()) - v_.begin());
}

Field& Field::operator+=(const Field& o) {
  require(grid_ == o.grid_, "grid mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require(grid_ == o.grid_, "grid mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& x : v_) x *= c;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

Field hadamard(const Field& a, const Field& b) {
  require(a.grid() == b.grid(), "grid mismatch");
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Spectrum to_spectral(const Field& u) {
  const Grid& g = u.grid();
  Spectrum s{g, std::vector<std::complex<double>>(g.spectral_size())};
  fft::r2c(g.n(), u.data().data(), s.c.data());
  const double hv = g.cell_volume();
  for (auto& c : s.c) c *= hv;
  return s;
}

Field from_spectral(const Spectrum& s) {
  const Grid& g = s.grid;
  require(s.c.size() == g.spectral_size(), "spectrum size does not match grid");
  std::vector<std::complex<double>> work = s.c;
  Field out(g);
  fft::c2r(g.n(), work.data(), out.data().data());
  const double box = 2.0 * g.L();
  out *= 1.0 / (box * box * box);
  return out;
}

double inner(const Field& u, const Field& v) {
  require(u.grid() == v.grid(), "grid mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc * u.grid().cell_volume();
}

double norm_l2sq(const Field& u) { return inner(u, u); }

double norm_l2sq_spectral(const Field& u) {
  Spectrum s = to_spectral(u);
  double acc = 0.0;
  for_each_mode(u.grid(), [&](std::size_t idx, double, double, double, double w) {
    acc += w * std::norm(s.c[idx]);
  });
  const double box = 2.0 * u.grid().L();
  return acc / (box * box * box);
}

double norm_lp(const Field& u, double q) {
  require(q >= 1.0, "norm_lp requires q >= 1");
  double acc = 0.0;
  for (double x : u.data()) acc += std::pow(std::abs(x), q);
  return std::pow(acc * u.grid().cell_volume(), 1.0 / q);
}

double integral(const Field& u) {
  double acc = 0.0;
  for (double x : u.data()) acc += x;
  return acc * u.grid().cell_volume();
}

Field shift(const Field& u, std::array<int, 3> offset) {
  const Grid& g = u.grid();
  const int n = g.n();
  auto wrap = [n](int a) { return ((a % n) + n) % n; };
  Field out(g);
  for (int k = 0; k < n; ++k) {
    int kk = wrap(k + offset[2]);
    for (int j = 0; j < n; ++j) {
      int jj = wrap(j + offset[1]);
      for (int i = 0; i < n; ++i) out(wrap(i + offset[0]), jj, kk) = u(i, j, k);
    }
  }
  return out;
}

Field recenter(const Field& u) {
  const Grid& g = u.grid();
  auto [i, j, k] = g.unravel(u.argmax());
  int c = g.n() / 2;
  return shift(u, {c - i, c - j, c - k});
}

double trilinear(const Field& u, double x, double y, double z) {
  const Grid& g = u.grid();
  const int n = g.n();
  const double h = g.h();
  double t[3] = {(x + g.L()) / h, (y + g.L()) / h, (z + g.L()) / h};
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    double fl = std::floor(t[a]);
    i0[a] = int(fl);
    f[a] = t[a] - fl;
  }
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        int i = i0[0] + di, j = i0[1] + dj, k = i0[2] + dk;
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) continue;
        double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) * (dk ? f[2] : 1.0 - f[2]);
        if (w != 0.0) acc += w * u(i, j, k);
      }
  return acc;
}

double trilinear_periodic(const Field& u, double x, double y, double z) {
  const Grid& g = u.grid();
  const int n = g.n();
  const double h = g.h();
  double t[3] = {(x + g.L()) / h, (y + g.L()) / h, (z + g.L()) / h};
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    double fl = std::floor(t[a]);
    f[a] = t[a] - fl;
    i0[a] = int(((long long)fl % n + n) % n);
  }
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) * (dk ? f[2] : 1.0 - f[2]);
        if (w != 0.0) acc += w * u((i0[0] + di) % n, (i0[1] + dj) % n, (i0[2] + dk) % n);
      }
  return acc;
}

Field derivative(const Field& u, int axis) {
  require(axis >= 0 && axis < 3, "axis must be 0, 1 or 2");
  const Grid& g = u.grid();
  const int n = g.n(), nh = g.nx_half();
  Spectrum s = to_spectral(u);
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < nh; ++i, ++idx) {
        int m = axis == 0 ? i : (axis == 1 ? j : k);
        if (m == n / 2) {
          s.c[idx] = 0.0;
          continue;
        }
        s.c[idx] *= std::complex<double>(0.0, g.wavenumber(m));
      }
  return from_spectral(s);
}

Field radial_derivative(const Field& u) {
  const Grid& g = u.grid();
  Field out(g);
  for (int axis = 0; axis < 3; ++axis) {
    Field d = derivative(u, axis);
    for (std::size_t idx = 0; idx < u.size(); ++idx) out[idx] += g.point(idx)[axis] * d[idx];
  }
  return out;
}

}  // namespace fracsp
