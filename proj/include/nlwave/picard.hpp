#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlwave/problem.hpp"
#include "nlwave/timeline.hpp"

namespace nlwave {

struct PicardOptions {
  double atol = 1e-10;
  double rtol = 1e-8;
  int max_iterations = 100;
  double blowup_ceiling = 1e6;
  double c0 = 1.0;  // window-rule constants, unknowable a priori
  double c1 = 1.0;
  double norm_s = 0.0;  // contraction norm parameters (H^{s,p}, inner l_q)
  double norm_p = 2.0;
  double norm_q = 2.0;
  // Proceed (with monitoring) when the user horizon exceeds the proven
  // window instead of failing with guidance.
  bool allow_unproven_window = false;
  // Stream seed for the finite-difference derivative sampling (the only
  // randomized ingredient; everything else is deterministic).
  std::uint64_t sample_seed = 0x9e3779b97f4a7c15ull;
};

struct PicardReport {
  double data_norm_M = 0.0;      // |A phi| and |A psi| data norms, summed
  double fbar = 0.0;             // derivative envelope at radius M+1
  double selected_window = 0.0;  // min(T_user, closed-form bounds)
  bool window_binds = false;     // selected_window < T_user
  int iterations = 0;
  std::vector<double> deltas;  // increment norms |u^{k+1} - u^k|_Y
  std::vector<double> rhos;    // delta_k / delta_{k-1}
  double stopping_threshold = 0.0;
  double max_blow_norm = 0.0;
  std::string status;  // "converged" or "max_iterations"
};

// Envelope of nonlinearity derivative norms up to the smoothness order over
// the closed ball of the given radius: callback if present; closed form for
// the power law; otherwise finite-difference sampling (256 points including
// per-channel real boundary samples) on the stream named by sample_seed.
// Sampling supports smoothness <= 2; higher orders require a callback.
double fbar_estimate(const Nonlinearity& f, double radius, int dim,
                     std::uint64_t sample_seed = 0x9e3779b97f4a7c15ull);

// min(T_user, b1, b2) with the two closed-form window bounds
//   b1 = 1 / ((M+1) (1 + 2 C0 (M+1) fbar))
//   b2 = (1/2) / (1 + C1 (M+1)^2 fbar),
// fbar already evaluated at radius M+1. Nonincreasing in M and fbar.
double select_window(double m_norm, double fbar, double c0, double c1,
                     double t_user);

// One contraction-map application: freeze the nonlinearity along u_k, form
// the forcing g_ext - F(u_k) (the equation carries +F(u) on the left), and
// solve the linear problem. F(u_k) spectra pass the 2/3-rule mask when
// prob.dealias is set.
SolutionTimeline apply_G(const NonlocalProblem& prob,
                         const SolutionTimeline& u_k);

// Y(T)-norm distance between two aligned timelines (max-in-time Sobolev
// plus max-in-time sup of |A u|), the contraction metric.
double timeline_distance(const SolutionTimeline& a, const SolutionTimeline& b,
                         const OperatorFamily& fam, double s, double p,
                         double q);

std::pair<SolutionTimeline, PicardReport> solve_nonlinear(
    const NonlocalProblem& prob, const PicardOptions& opts = {});

// Continues a converged solution past its horizon by plain Cauchy windows
// (zero measures) with data (u(T), u_t(T)), the same time step, and window
// spans snapped to whole steps (at least 8 per window). extra_T must be a
// whole number of steps; only zero external forcing extends. On a window's
// NonContraction the span halves (down to the 8-step floor, at most 4
// times). Returns the concatenated timeline.
SolutionTimeline extend_solution(const NonlocalProblem& prob,
                                 const SolutionTimeline& sol, double extra_T,
                                 const PicardOptions& opts = {});

}  // namespace nlwave
