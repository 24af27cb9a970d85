#include "nlwave/problem.hpp"

#include <cmath>

#include "nlwave/errors.hpp"

namespace nlwave {

Nonlinearity Nonlinearity::none() { return {}; }

Nonlinearity Nonlinearity::power_law(double lambda, double p) {
  if (!(p > 1.0)) throw ConfigError("power_law: exponent p must be > 1");
  if (!std::isfinite(lambda)) throw ConfigError("power_law: lambda not finite");
  Nonlinearity f;
  f.zero_ = (lambda == 0.0);
  f.power_ = true;
  f.lambda_ = lambda;
  f.p_ = p;
  f.smoothness_ = 1;
  return f;
}

Nonlinearity Nonlinearity::custom(Map map, int dim, int smoothness,
                                  DerivativeBound derivative_bound) {
  if (!map) throw ConfigError("custom nonlinearity: empty map");
  if (dim < 1) throw ConfigError("custom nonlinearity: dim must be >= 1");
  if (smoothness < 1)
    throw ConfigError("custom nonlinearity: smoothness order must be >= 1");
  Nonlinearity f;
  f.zero_ = false;
  f.power_ = false;
  f.smoothness_ = smoothness;
  f.map_ = std::move(map);
  f.bound_ = std::move(derivative_bound);
  std::vector<cplx> zero(std::size_t(dim), cplx(0.0));
  f.f0_.assign(std::size_t(dim), cplx(0.0));
  f.map_(zero, f.f0_);
  return f;
}

void Nonlinearity::apply(std::span<const cplx> u, std::span<cplx> out) const {
  if (zero_) {
    for (cplx& x : out) x = 0.0;
    return;
  }
  if (power_) {
    for (std::size_t c = 0; c < u.size(); ++c)
      out[c] = lambda_ * std::pow(std::abs(u[c]), p_ - 1.0) * u[c];
    return;
  }
  if (u.size() != f0_.size())
    throw ConfigError("nonlinearity: channel count does not match map dim");
  map_(u, out);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] -= f0_[c];
}

std::vector<double> NonlocalProblem::grid_times() const {
  std::vector<double> t(time_steps + 1);
  const double step = dt();
  for (std::size_t k = 0; k <= time_steps; ++k) t[k] = step * double(k);
  t.back() = horizon;
  return t;
}

void NonlocalProblem::validate() const {
  if (!grid) throw ConfigError("problem: missing grid");
  if (!family) throw ConfigError("problem: missing operator family");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("problem: horizon must be positive and finite");
  if (time_steps < 8) throw ConfigError("problem: time grid needs K >= 8");
  const double tol = 1e-12 * horizon;
  if (std::abs(alpha.horizon() - horizon) > tol ||
      std::abs(beta.horizon() - horizon) > tol)
    throw ConfigError("problem: measure horizons must equal T");
  const int n = family->dim();
  auto check_field = [&](const Field& f, const char* name, Space space) {
    if (f.grid.get() != grid.get())
      throw ConfigError(std::string("problem: ") + name +
                        " not on the problem grid");
    if (f.channels != n)
      throw ConfigError(std::string("problem: ") + name +
                        " channel count does not match the operator");
    if (f.space != space)
      throw ConfigError(std::string("problem: ") + name + " in wrong space");
    if (f.data.size() != grid->modes() * std::size_t(n))
      throw ConfigError(std::string("problem: ") + name + " has wrong size");
  };
  check_field(phi, "phi", Space::Frequency);
  check_field(psi, "psi", Space::Frequency);
  if (!forcing.empty()) {
    if (forcing.size() != time_steps + 1)
      throw ConfigError("problem: forcing timeline must have K+1 snapshots");
    for (const Field& f : forcing) check_field(f, "forcing", Space::Physical);
  }
  if (!(gamma >= 0.0 && gamma < 0.5))
    throw ConfigError("problem: gamma must lie in [0, 1/2)");
  if (det_margin_fraction < 0.0)
    throw ConfigError("problem: det_margin_fraction must be >= 0");
}

}  // namespace nlwave
