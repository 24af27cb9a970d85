#pragma once

#include <vector>

#include "nlwave/operator_family.hpp"
#include "nlwave/problem.hpp"
#include "nlwave/timeline.hpp"

namespace nlwave {

// Kernel-identity checks per (eigenchannel, xi^2, t). Violations are
// normalized as |lhs - rhs| / (1 + |lhs| + |rhs|) so channels with
// exponentially growing kernels are judged by significant digits, not by
// absolute size.
struct IdentityReport {
  double c_at_zero = 0.0;            // max |c_j(0) - 1|
  double s_at_zero = 0.0;            // max |s_j(0)|
  double pythagorean = 0.0;          // c^2 + mu2 s^2 = 1, normalized
  double s_derivative = 0.0;         // central diff of s vs c, normalized
  double c_second_derivative = 0.0;  // second diff of c vs -mu2 c, normalized
  // For families with real nonnegative spectrum: how far the evaluated
  // operator norm of C(t) rises above 1.01 * kappa(V) (0 when within, or
  // when the spectrum disqualifies the bound).
  double growth_excess = 0.0;
  bool growth_checked = false;
};

struct IdentityOptions {
  double fd_step = 1e-4;
};

IdentityReport identity_suite(const OperatorFamily& fam,
                              const std::vector<double>& xi2_list,
                              const std::vector<double>& t_list,
                              const IdentityOptions& opts = {});

// Discrete-form checks of the solved equation and its integral conditions.
// The equation residual uses 4th-order central time differences on the
// frequency-space timeline with dense A applications (no eigenbasis). The
// condition integrals are re-evaluated independently of the assembly: atoms
// through the mild formula at their exact locations, densities resampled
// onto the solver's time grid by linear interpolation and integrated there.
struct ResidualReport {
  double pde_max = 0.0;       // sup over modes/channels/interior samples
  double condition_u = 0.0;   // sup_x |u(.,0) - phi - int alpha(s) u(.,s) ds|
  double condition_ut = 0.0;  // sup_x of the u_t condition with beta, psi
  std::vector<double> pde_timeline;  // per interior sample, sup over modes
};

ResidualReport residual_suite(const SolutionTimeline& sol,
                              const NonlocalProblem& prob);

// Solution-vs-data norm ratios for the monitored a-priori estimates. Each
// entry reports lhs, rhs, and lhs/rhs; rhs = 0 marks the entry not
// applicable. Ratios are diagnostics (constants in the estimates are not
// computable), checked only for finiteness and stability.
struct EstimateEntry {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool applicable = false;
};

struct EstimateReport {
  EstimateEntry sup_laplacian_g;  // sup-norm lhs; data norms carry |Lap g|
  EstimateEntry sup_plain_g;      // same with |g| in place of |Lap g|
  EstimateEntry sup_sqrt_psi;     // A^(1/2) psi in place of A psi
  EstimateEntry sobolev_uniform;  // Sobolev lhs, no L1 data terms
  EstimateEntry weighted_lq;      // dyadic-weighted inner norms
};

struct EstimateParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  double sigma = 0.0;
  double gamma = 0.0;  // in [0, 1/2)
};

EstimateReport estimate_monitor(const SolutionTimeline& sol,
                                const NonlocalProblem& prob,
                                const EstimateParams& params = {});

}  // namespace nlwave
