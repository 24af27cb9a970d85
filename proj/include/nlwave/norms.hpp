#pragma once

#include <limits>
#include <span>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/operator_family.hpp"

namespace nlwave {

inline constexpr double inf_exponent = std::numeric_limits<double>::infinity();

// (sum_j |v_j|^q)^(1/q); q = inf gives max_j |v_j|.
double lq_norm(std::span<const cplx> v, double q);

// (sum_j 2^(sigma j) |v_j|^q)^(1/q) with 1-based j; sigma = 0 reduces to
// lq_norm. q = inf gives max_j 2^(sigma j / q)... not defined by the display,
// so q = inf requires sigma = 0.
double lq_sigma_norm(std::span<const cplx> v, double q, double sigma);

// Discrete L^p norm with cell measure (L/P)^n, inner channel norm
// lq_sigma(q, sigma). p = inf is the grid max of the inner norm.
double lp_norm(const Field& physical, double p, double q, double sigma = 0.0);

// H^{s,p}: multiplier (1+|xi|^2)^(s/2) in frequency, inverse transform, then
// lp_norm. Accepts a field in either space.
double sobolev_norm(const Field& f, double s, double p, double q = 2.0,
                    double sigma = 0.0);

// Frequency-side multiplier helpers (pure).
Field sobolev_multiplier(const Field& frequency, double s);
Field laplacian_multiplier(const Field& frequency);  // multiplies by -|xi|^2

// Pointwise operator application A f(x) (dense product per grid point).
Field apply_family(const OperatorFamily& fam, const Field& physical);
// Pointwise A^gamma f(x) via the eigendecomposition (shift 0).
Field apply_family_power(const OperatorFamily& fam, double gamma,
                         const Field& physical);

// max over samples of sobolev_norm(u, s, p, q) plus max over samples of the
// grid sup of |A u(x)|_q (the A-part of the E(A) graph norm).
double y_norm(const std::vector<Field>& samples, const OperatorFamily& fam,
              double s, double p, double q = 2.0);

}  // namespace nlwave
