#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "nlwave/grid.hpp"

namespace nlwave {

// Per-run solver diagnostics, attached to every timeline.
struct LinearDiagnostics {
  double invertibility_margin = 1.0;
  double invertibility_bound = 1.0;  // 1/margin when margin > 0, else +inf
  // Minimum over modes and eigenchannels of |a11 a22 - a12 a21|.
  double min_determinant = std::numeric_limits<double>::infinity();
  // Minimum over modes and eigenchannels of |O_j(xi)|, where
  // O_j = 1 + total(alpha) total(beta) - integral of (alpha+beta) c_j.
  double min_O_modulus = std::numeric_limits<double>::infinity();
  // Max |det_j - O_j|: the two are distinct quantities in general, so the
  // discrepancy is reported, never asserted small.
  double max_determinant_O_discrepancy = 0.0;
  // Max over modes/channels of |Im sqrt(mu2)| (exponential growth rate of
  // the mode; 0 for real spectrum >= 0).
  double max_mode_growth_rate = 0.0;
  // Single-integral pairing of the two densities (diagnostic only; the
  // margin itself uses the product of totals).
  double pointwise_product_integral = 0.0;
  double boundary_leak_ratio = 0.0;
  bool grid_leak_warning = false;
};

// Discrete solution on the uniform time grid: physical snapshots of u and
// u_t, plus the per-mode initial coefficients retained for residual checks.
struct SolutionTimeline {
  std::vector<double> times;  // K+1 samples, times[k] = k dt
  std::vector<Field> u;       // physical space, one per sample
  std::vector<Field> ut;      // physical space, one per sample
  Field u0_hat;               // frequency space: solved u(.,0) coefficients
  Field u1_hat;               // frequency space: solved u_t(.,0) coefficients
  LinearDiagnostics diagnostics;

  std::size_t samples() const { return times.size(); }
};

}  // namespace nlwave
