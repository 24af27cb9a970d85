#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/operator_family.hpp"
#include "nlwave/time_measure.hpp"

namespace nlwave {

enum class Exec { Serial, Parallel };

// Pointwise nonlinearity F applied at each physical grid point, normalized
// so that F(0) = 0 (the raw map's value at 0 is subtracted on apply).
class Nonlinearity {
 public:
  using Map = std::function<void(std::span<const cplx>, std::span<cplx>)>;
  using DerivativeBound = std::function<double(double)>;  // radius -> bound

  static Nonlinearity none();
  // F(u) = lambda |u|^(p-1) u, channel-wise modulus; p > 1.
  static Nonlinearity power_law(double lambda, double p);
  // User map on E = C^dim with smoothness order k >= 1; derivative_bound
  // (radius -> bound) optional, estimated by sampling when absent. F(0) is
  // probed once here so apply can subtract it.
  static Nonlinearity custom(Map map, int dim, int smoothness,
                             DerivativeBound derivative_bound = nullptr);

  bool is_zero() const { return zero_; }
  bool is_power_law() const { return power_; }
  double lambda() const { return lambda_; }
  double exponent() const { return p_; }
  int smoothness() const { return smoothness_; }
  const DerivativeBound& derivative_bound() const { return bound_; }

  // out = F(u) - F(0), channel vectors of the same length.
  void apply(std::span<const cplx> u, std::span<cplx> out) const;

 private:
  bool zero_ = true;
  bool power_ = false;
  double lambda_ = 0.0;
  double p_ = 3.0;
  int smoothness_ = 1;
  Map map_;
  DerivativeBound bound_;
  std::vector<cplx> f0_;  // F_raw(0), captured at construction
};

// Linear wave problem with integral initial conditions:
//   u_tt - Laplace u + A u = g          on [0, T] x box
//   u(x,0)   = phi(x) + integral of alpha(s) u(x,s) ds over [0, T]
//   u_t(x,0) = psi(x) + integral of beta(s) u_t(x,s) ds over [0, T]
// phi/psi live in frequency space; the forcing timeline (when present) holds
// physical-space snapshots at the K+1 uniform grid times.
struct NonlocalProblem {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const OperatorFamily> family;
  TimeMeasure alpha = TimeMeasure::zero(1.0);
  TimeMeasure beta = TimeMeasure::zero(1.0);
  Field phi;                  // frequency space
  Field psi;                  // frequency space
  std::vector<Field> forcing; // physical space, size 0 (zero g) or K+1
  std::size_t time_steps = 8; // K >= 8; grid times t_k = k T / K
  double horizon = 1.0;       // T; must equal both measure horizons
  double gamma = 0.0;         // monitored-estimate exponent in [0, 1/2)

  Nonlinearity nonlinearity;  // used by the Picard layer only

  // Solver knobs.
  Exec exec = Exec::Parallel;
  double det_margin_fraction = 0.0;  // guard: |det| > max(1e-14, frac*margin)
  bool check_box_fit = false;        // enable the boundary-leak warning
  bool dealias = true;               // 2/3-rule mask on F(u) spectra

  double dt() const { return horizon / double(time_steps); }
  std::vector<double> grid_times() const;

  // Throws ConfigError on any invariant violation (shared grid/dimension,
  // K >= 8, measure horizons equal T, forcing length).
  void validate() const;
};

}  // namespace nlwave
