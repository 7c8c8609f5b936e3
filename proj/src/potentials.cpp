#include "fracsp/potentials.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fracsp/error.hpp"

namespace fracsp {
namespace {

double dist(const Vec3& a, const Vec3& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// |z|^r from |z|^2, with a multiply-only path for even integer degrees.
double radial_power(double r2, double r) {
  double half = 0.5 * r;
  if (half == std::floor(half) && half >= 1.0 && half <= 8.0) {
    double out = r2;
    for (int i = 1; i < int(half); ++i) out *= r2;
    return out;
  }
  return r2 == 0.0 ? 0.0 : std::pow(r2, half);
}

}  // namespace

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::constant: return "constant";
    case PotentialKind::single_well: return "single_well";
    case PotentialKind::multi_well: return "multi_well";
    case PotentialKind::custom_table: return "custom_table";
  }
  return "?";
}

PotentialKind potential_kind_from_string(const std::string& s) {
  if (s == "zero") return PotentialKind::zero;
  if (s == "constant") return PotentialKind::constant;
  if (s == "single_well") return PotentialKind::single_well;
  if (s == "multi_well") return PotentialKind::multi_well;
  if (s == "custom_table") return PotentialKind::custom_table;
  throw Error("unknown potential kind '" + s + "'");
}

double Potential::operator()(const Vec3& x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::constant: return v_inf_;
    case PotentialKind::single_well:
    case PotentialKind::multi_well: {
      double f = 1.0;
      for (const Well& w : wells_) {
        double dx = x[0] - w.x[0], dy = x[1] - w.x[1], dz = x[2] - w.x[2];
        f *= radial_power(dx * dx + dy * dy + dz * dz, w.r);
      }
      return v_inf_ * f / (1.0 + f);
    }
    case PotentialKind::custom_table: return trilinear(*table_, x[0], x[1], x[2]);
  }
  return 0.0;
}

Field Potential::on_grid(const Grid& g) const {
  if (kind_ == PotentialKind::custom_table) {
    require(table_->grid() == g, "custom potential table is defined on a different grid");
    return *table_;
  }
  Field out(g);
  for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = (*this)(g.point(idx));
  return out;
}

double Potential::local_model(std::size_t i, const Vec3& z) const {
  const Well& w = wells_.at(i);
  return w.c * radial_power(z[0] * z[0] + z[1] * z[1] + z[2] * z[2], w.r);
}

Potential make_zero_potential() { return Potential{}; }

Potential make_constant_potential(double value) {
  require(value >= 0.0, "constant potential must be nonnegative");
  Potential p;
  p.kind_ = PotentialKind::constant;
  p.v_inf_ = value;
  return p;
}

Potential make_single_well(const Vec3& x0, double r, double V_inf) {
  require(r > 0.0, "well degree r must be positive");
  require(V_inf > 0.0, "V_inf must be positive");
  Potential p;
  p.kind_ = PotentialKind::single_well;
  p.v_inf_ = V_inf;
  p.wells_.push_back({x0, r, V_inf});
  return p;
}

Potential make_multi_well(const std::vector<std::pair<Vec3, double>>& wells, double V_inf,
                          double box_half_width) {
  require(!wells.empty(), "at least one well is required");
  require(V_inf > 0.0, "V_inf must be positive");
  for (std::size_t i = 0; i < wells.size(); ++i) {
    require(wells[i].second > 0.0, "well degree r must be positive");
    for (int a = 0; a < 3; ++a)
      require(std::abs(wells[i].first[a]) <= 0.75 * box_half_width,
              "well too close to boundary");
    for (std::size_t j = 0; j < i; ++j)
      require(dist(wells[i].first, wells[j].first) > 0.0, "overlapping wells");
  }
  Potential p;
  p.kind_ = wells.size() == 1 ? PotentialKind::single_well : PotentialKind::multi_well;
  p.v_inf_ = V_inf;
  for (std::size_t j = 0; j < wells.size(); ++j) {
    double c = V_inf;
    for (std::size_t i = 0; i < wells.size(); ++i)
      if (i != j) c *= std::pow(dist(wells[j].first, wells[i].first), wells[i].second);
    p.wells_.push_back({wells[j].first, wells[j].second, c});
  }
  return p;
}

Potential make_custom_table(const Field& values, std::vector<Well> wells) {
  require(values.all_finite(), "custom potential contains non-finite samples");
  double lo = *std::min_element(values.data().begin(), values.data().end());
  double hi = *std::max_element(values.data().begin(), values.data().end());
  Potential p;
  p.kind_ = PotentialKind::custom_table;
  std::vector<double> shifted(values.data());
  for (double& v : shifted) v -= lo;
  p.table_ = Field(values.grid(), std::move(shifted));
  p.v_inf_ = hi - lo;
  p.wells_ = std::move(wells);
  return p;
}

void check_wells_inside(const Potential& pot, const Grid& g) {
  for (const Well& w : pot.wells())
    for (int a = 0; a < 3; ++a)
      require(std::abs(w.x[a]) <= 0.75 * g.L(), "well too close to boundary");
}

std::array<double, 3> local_model_ratios(const Potential& pot, std::size_t well, double h) {
  const Well& w = pot.wells().at(well);
  std::array<double, 3> out{};
  const double radii[3] = {4 * h, 2 * h, h};
  for (int i = 0; i < 3; ++i) {
    Vec3 z{radii[i], 0.0, 0.0};
    Vec3 x{w.x[0] + z[0], w.x[1], w.x[2]};
    out[i] = pot(x) / pot.local_model(well, z);
  }
  return out;
}

std::pair<double, double> fit_local_model(const Potential& pot, std::size_t well, double rmin,
                                          double rmax) {
  const Well& w = pot.wells().at(well);
  constexpr int samples = 16;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int dir = 0; dir < 6; ++dir) {
    for (int t = 0; t < samples; ++t) {
      double rad = rmin * std::pow(rmax / rmin, double(t) / (samples - 1));
      Vec3 x = w.x;
      x[dir / 2] += (dir % 2 ? -rad : rad);
      double v = pot(x);
      double lx = std::log(rad), ly = std::log(v);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++cnt;
    }
  }
  double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  double icept = (sy - slope * sx) / cnt;
  return {slope, std::exp(icept)};
}

double compute_H(const Potential& pot, std::size_t well, const Vec3& y, const Field& Q,
                 double a_star) {
  (void)a_star;
  require(std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]),
          "compute_H: offset y must be finite");
  const Grid& g = Q.grid();
  const Well& w = pot.wells().at(well);
  // The plane at index 0 is both x = -L and x = +L; its weight is split
  // evenly so the quadrature is symmetric under reflection.
  struct Node { double x[2]; double w[2]; int count; };
  auto nodes = [&](int axis) {
    std::vector<Node> out(std::size_t(g.n()));
    for (int i = 0; i < g.n(); ++i) {
      double x = g.coord(i) + y[std::size_t(axis)];
      out[std::size_t(i)] = i == 0 ? Node{{x, x + 2.0 * g.L()}, {0.5, 0.5}, 2} : Node{{x, 0.0}, {1.0, 0.0}, 1};
    }
    return out;
  };
  const auto nx = nodes(0), ny = nodes(1), nz = nodes(2);
  double acc = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        const Node &a = nx[std::size_t(i)], &b = ny[std::size_t(j)], &c = nz[std::size_t(k)];
        double q = Q(i, j, k), v = 0.0;
        for (int ia = 0; ia < a.count; ++ia)
          for (int ib = 0; ib < b.count; ++ib)
            for (int ic = 0; ic < c.count; ++ic) {
              double r2 = a.x[ia] * a.x[ia] + b.x[ib] * b.x[ib] + c.x[ic] * c.x[ic];
              v += a.w[ia] * b.w[ib] * c.w[ic] * radial_power(r2, w.r);
            }
        acc += v * q * q;
      }
  return w.c * acc * g.cell_volume();
}

const WellLandscape* LandscapeReport::find(std::size_t well) const {
  for (const auto& w : per_well)
    if (w.well == well) return &w;
  return nullptr;
}

namespace {

WellLandscape analyze_well(const Potential& pot, std::size_t well, const Field& Q,
                           double a_star) {
  const double h = Q.grid().h();
  const int R = int(std::lround(2.0 / h));
  const int m = 2 * R + 1;
  auto H = [&](const Vec3& y) { return compute_H(pot, well, y, Q, a_star); };

  std::vector<double> coarse(std::size_t(m) * m * m);
  auto cidx = [m](int a, int b, int c) { return std::size_t(a) + m * (std::size_t(b) + m * c); };
  for (int c = 0; c < m; ++c)
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a)
        coarse[cidx(a, b, c)] = H({(a - R) * h, (b - R) * h, (c - R) * h});

  // Coarse local minima over the 26-neighbourhood (clipped at the search cube).
  std::vector<Vec3> starts;
  for (int c = 0; c < m; ++c)
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a) {
        double v = coarse[cidx(a, b, c)];
        bool is_min = true;
        for (int dc = -1; dc <= 1 && is_min; ++dc)
          for (int db = -1; db <= 1 && is_min; ++db)
            for (int da = -1; da <= 1 && is_min; ++da) {
              if (!da && !db && !dc) continue;
              int aa = a + da, bb = b + db, cc = c + dc;
              if (aa < 0 || bb < 0 || cc < 0 || aa >= m || bb >= m || cc >= m) continue;
              if (coarse[cidx(aa, bb, cc)] < v) is_min = false;
            }
        if (is_min) starts.push_back({(a - R) * h, (b - R) * h, (c - R) * h});
      }

  WellLandscape out;
  out.well = well;
  std::vector<std::pair<Vec3, double>> refined;
  for (Vec3 y : starts) {
    double fy = H(y);
    double step = 0.5 * h;
    int steps = 0;
    bool ok = true;
    while (step >= h / 16.0 - 1e-15) {
      bool moved = false;
      for (int axis = 0; axis < 3; ++axis)
        for (double sgn : {1.0, -1.0}) {
          Vec3 t = y;
          t[axis] += sgn * step;
          double ft = H(t);
          if (ft < fy) {
            y = t;
            fy = ft;
            moved = true;
          }
        }
      if (++steps > 200) {
        ok = false;
        break;
      }
      if (!moved) step *= 0.5;
    }
    if (!ok) {
      out.converged = false;
      continue;
    }
    bool dup = false;
    for (auto& [yy, fv] : refined)
      if (dist(yy, y) < 0.5 * h) {
        dup = true;
        if (fy < fv) { yy = y; fv = fy; }
      }
    if (!dup) refined.push_back({y, fy});
  }
  if (refined.empty()) {
    out.converged = false;
    return out;
  }
  auto best = std::min_element(refined.begin(), refined.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  out.lambda_bar = best->second;
  out.y0 = best->first;
  const double tol = 1e-8 * std::max(1.0, std::abs(out.lambda_bar));
  for (const auto& [y, fv] : refined)
    if (fv - out.lambda_bar <= tol) out.minimizers.push_back(y);

  const double d = 0.25 * h;
  const double f0 = out.lambda_bar;
  auto at = [&](int a, double sa, int b, double sb) {
    Vec3 y = out.y0;
    y[a] += sa;
    y[b] += sb;
    return H(y);
  };
  for (int a = 0; a < 3; ++a) {
    out.hessian[a][a] = (at(a, d, a, 0.0) - 2.0 * f0 + at(a, -d, a, 0.0)) / (d * d);
    for (int b = a + 1; b < 3; ++b) {
      double v = (at(a, d, b, d) - at(a, d, b, -d) - at(a, -d, b, d) + at(a, -d, b, -d)) /
                 (4.0 * d * d);
      out.hessian[a][b] = out.hessian[b][a] = v;
    }
  }
  Eigen::Matrix3d hm;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) hm(a, b) = out.hessian[a][b];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hm, Eigen::EigenvaluesOnly);
  out.hessian_min_eig = es.eigenvalues().minCoeff();
  return out;
}

}  // namespace

LandscapeReport analyze_landscape(const Potential& pot, const Field& Q, double a_star) {
  require(!pot.wells().empty(), "analyze_landscape: potential has no declared wells");
  LandscapeReport rep;
  for (const Well& w : pot.wells()) rep.r = std::max(rep.r, w.r);
  for (std::size_t i = 0; i < pot.wells().size(); ++i)
    if (std::abs(pot.wells()[i].r - rep.r) <= 1e-12 * rep.r) rep.zbar.push_back(i);

  rep.lambda_bar_0 = std::numeric_limits<double>::infinity();
  for (std::size_t i : rep.zbar) {
    rep.per_well.push_back(analyze_well(pot, i, Q, a_star));
    if (!rep.per_well.back().converged) rep.converged = false;
    rep.lambda_bar_0 = std::min(rep.lambda_bar_0, rep.per_well.back().lambda_bar);
  }
  const double tol = 1e-8 * std::max(1.0, std::abs(rep.lambda_bar_0));
  rep.nondegenerate = true;
  for (const auto& w : rep.per_well) {
    if (w.lambda_bar - rep.lambda_bar_0 > tol) continue;
    rep.z0.push_back(w.well);
    if (w.minimizers.size() != 1 || !(w.hessian_min_eig > 0.0)) rep.nondegenerate = false;
  }
  rep.satisfies_v3 = rep.converged && rep.nondegenerate && rep.z0.size() == 1;
  return rep;
}

}  // namespace fracsp
