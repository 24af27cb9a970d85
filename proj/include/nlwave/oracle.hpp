#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "nlwave/problem.hpp"
#include "nlwave/timeline.hpp"

namespace nlwave {

// Brute-force reference for one mode, sharing no code with the solver's
// kernel formulas: integrates v'' + (A + xi2 I) v = g with RK4 on a grid
// fine_factor times finer (dense A applications, no eigendecomposition),
// runs the 2N+1 fundamental trajectories, and imposes the two integral
// conditions through the affine dependence of (v, v_t) on (v(0), v_t(0))
// as one dense 2Nx2N solve. The measure integrals reuse the same nodes and
// weights as the solver (atoms exact, density trapezoid); trajectory values
// at off-grid times come from 4-point Lagrange interpolation.
struct OracleResult {
  Eigen::VectorXcd u0, u1;  // E-coordinates
};

OracleResult oracle_solve_mode(
    const OperatorFamily& family, double xi2, const Eigen::VectorXcd& phi_hat,
    const Eigen::VectorXcd& psi_hat, const TimeMeasure& alpha,
    const TimeMeasure& beta,
    const std::vector<Eigen::VectorXcd>& g_series,  // K+1 E-vectors or empty
    double horizon, std::size_t time_steps, int fine_factor);

struct OracleComparison {
  double max_rel_error = 0.0;     // |solver - oracle| / (1 + |oracle|), sup
  std::size_t worst_mode = 0;
  std::size_t modes_checked = 0;
};

// Re-derives (u0, u1) for a subset of modes (all when modes <= max_modes,
// else an even stride) and compares against the solved coefficients.
OracleComparison compare_with_oracle(const NonlocalProblem& prob,
                                     const SolutionTimeline& sol,
                                     int fine_factor,
                                     std::size_t max_modes = 64);

}  // namespace nlwave
