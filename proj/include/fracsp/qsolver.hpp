#pragma once

// Ground profile Q: the positive solution of (-Delta)^s Q + Q - Q^{p-1} = 0,
// its critical mass a* = ||Q||_2^2, and identity-based diagnostics.

#include <array>
#include <optional>
#include <vector>

#include "fracsp/grid.hpp"

namespace fracsp {

struct GroundStateQ {
  Field Q;
  double s = 0.0;
  double p = 0.0;
  double a_star = 0.0;
  double residual = 0.0;           // ||(-Delta)^s Q + Q - Q^{p-1}||_2
  double stabilizer = 0.0;         // final S_n
  int iterations = 0;
  std::array<double, 2> pohozaev_ratios{};
  double decay_exponent = 0.0;     // NaN when the tail fit is not possible
  double decay_r_squared = 0.0;

  double relative_residual() const;
};

// Petviashvili iteration
//   u <- S^gamma ((-Delta)^s + 1)^{-1} |u|^{p-2} u,
//   S = <((-Delta)^s + 1) u, u> / <|u|^{p-2} u, u>,  gamma = (p-1)/(p-2),
// stopped once |S - 1| < tol and the relative residual < tol. The result is
// cyclically recentred so its maximum sits at the origin cell.
GroundStateQ solve_Q(const Grid& grid, double s, double p, double tol = 1e-10,
                     int max_iter = 500, const std::optional<Field>& seed = std::nullopt);

// ||(-Delta)^s u + u - |u|^{p-2} u||_2 / ||u||_2.
double q_residual(const Field& u, double s, double p);

// (seminorm / int Q^p, seminorm / int Q^2).
std::array<double, 2> pohozaev_check(const Field& Q, double s, double p);

struct DecayFit {
  double exponent = 0.0;   // minus the log-log slope
  double r_squared = 0.0;
  bool power_law = false;  // r_squared >= 0.99
  int samples = 0;
};

// Log-log fit along the six half-axes from the origin cell over |x| in
// [L/4, 3L/4]. Throws if any sample in the window is non-positive.
DecayFit decay_fit(const Field& u);

// L v = (-Delta)^s v + v - (p-1) Q^{p-2} v.
Field linearized_apply(const Field& Q, double s, double p, const Field& v);

struct KernelCheck {
  std::array<double, 3> kernel_residuals{};  // ||L dQ/dx_i|| / ||dQ/dx_i||
  double pseudo_eigen_error = 0.0;           // ||L w + (p-2) Q|| / ||(p-2) Q||
};

// w = Q + ((p-2)/(2s)) x.grad Q satisfies L w = -(p-2) Q.
KernelCheck linearized_kernel_check(const Field& Q, double s, double p);

// ||L v|| / ||v|| for v orthogonalized against the translation modes.
double linearized_gap_probe(const Field& Q, double s, double p, const Field& v);

// |<(-Delta)^s u, x.grad u> - ((2s-3)/2) seminorm| / |((2s-3)/2) seminorm|.
// Throws if u has not decayed below 1e-4 max|u| on the boundary faces.
double virial_check(const Field& u, double s);

}  // namespace fracsp
