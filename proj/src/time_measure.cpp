#include "nlwave/time_measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlwave/errors.hpp"

namespace nlwave {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

TimeMeasure::TimeMeasure(double horizon, std::vector<Atom> atoms,
                         std::vector<cplx> density)
    : horizon_(horizon), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw ConfigError("measure horizon must be positive and finite");
  for (const Atom& a : atoms_) {
    if (a.location < 0.0 || a.location > horizon_)
      throw ConfigError("atom location " + std::to_string(a.location) +
                        " outside [0," + std::to_string(horizon_) + "]");
    if (!finite(a.weight)) throw ConfigError("atom weight not finite");
  }
  if (density_.size() == 1)
    throw ConfigError("density needs at least 2 samples");
  for (cplx v : density_)
    if (!finite(v)) throw ConfigError("density sample not finite");
}

cplx TimeMeasure::total() const {
  return integrate([](double) { return 1.0; });
}

double TimeMeasure::absolute_total() const {
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += std::abs(a.weight);
  if (!density_.empty()) {
    const std::size_t s = density_.size();
    const double dt = horizon_ / double(s - 1);
    for (std::size_t q = 0; q < s; ++q) {
      const double w = (q == 0 || q + 1 == s) ? 0.5 * dt : dt;
      acc += w * std::abs(density_[q]);
    }
  }
  return acc;
}

double invertibility_margin(const TimeMeasure& alpha, const TimeMeasure& beta) {
  return std::abs(1.0 + alpha.total() * beta.total()) -
         (alpha.absolute_total() + beta.absolute_total());
}

cplx pointwise_product_integral(const TimeMeasure& alpha, const TimeMeasure& beta) {
  if (alpha.density().empty() || beta.density().empty()) return 0.0;
  const double t = std::min(alpha.horizon(), beta.horizon());
  const std::size_t s = std::max(alpha.density().size(), beta.density().size());
  const double dt = t / double(s - 1);
  auto sample = [](const TimeMeasure& m, double at) {
    const std::size_t n = m.density().size();
    const double step = m.horizon() / double(n - 1);
    double pos = at / step;
    std::size_t i = std::min<std::size_t>(std::size_t(pos), n - 2);
    double frac = pos - double(i);
    return (1.0 - frac) * m.density()[i] + frac * m.density()[i + 1];
  };
  cplx acc = 0.0;
  for (std::size_t q = 0; q < s; ++q) {
    const double w = (q == 0 || q + 1 == s) ? 0.5 * dt : dt;
    const double at = dt * double(q);
    acc += w * sample(alpha, at) * sample(beta, at);
  }
  return acc;
}

}  // namespace nlwave
