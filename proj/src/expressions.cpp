#include "nlwave/expressions.hpp"

#include <cmath>
#include <numbers>

#include "nlwave/errors.hpp"

namespace nlwave {

namespace {

void add_term(Field& phys, const SpatialTerm& term) {
  const Grid& g = *phys.grid;
  const int nc = phys.channels;
  if (int(term.amplitude.size()) != nc)
    throw ConfigError("expression: amplitude entries must match channels");

  const double l = g.length();
  switch (term.kind) {
    case SpatialTerm::Kind::Constant: {
      for (std::size_t m = 0; m < g.modes(); ++m)
        for (int c = 0; c < nc; ++c)
          phys.data[m * std::size_t(nc) + std::size_t(c)] +=
              term.amplitude[std::size_t(c)];
      return;
    }
    case SpatialTerm::Kind::Gaussian: {
      if (!(term.width > 0.0))
        throw ConfigError("expression: gaussian width must be > 0");
      const double inv2w2 = 1.0 / (2.0 * term.width * term.width);
      for (std::size_t m = 0; m < g.modes(); ++m) {
        const std::array<double, 3> x = g.coords(m);
        double r2 = 0.0;
        for (int d = 0; d < g.dim(); ++d) {
          const double dx = x[std::size_t(d)] - term.center[std::size_t(d)];
          r2 += dx * dx;
        }
        const double v = std::exp(-r2 * inv2w2);
        for (int c = 0; c < nc; ++c)
          phys.data[m * std::size_t(nc) + std::size_t(c)] +=
              v * term.amplitude[std::size_t(c)];
      }
      return;
    }
    case SpatialTerm::Kind::PlaneWave: {
      const double k0 = 2.0 * std::numbers::pi / l;
      for (std::size_t m = 0; m < g.modes(); ++m) {
        const std::array<double, 3> x = g.coords(m);
        double phase = 0.0;
        for (int d = 0; d < g.dim(); ++d)
          phase += k0 * double(term.wavevector[std::size_t(d)]) *
                   x[std::size_t(d)];
        const cplx v = std::exp(cplx(0.0, phase));
        for (int c = 0; c < nc; ++c)
          phys.data[m * std::size_t(nc) + std::size_t(c)] +=
              v * term.amplitude[std::size_t(c)];
      }
      return;
    }
  }
  throw ConfigError("expression: unknown spatial term kind");
}

}  // namespace

double envelope_value(const TimeEnvelope& env, double t) {
  switch (env.kind) {
    case TimeEnvelope::Kind::One:
      return 1.0;
    case TimeEnvelope::Kind::Cosine:
      return std::cos(env.rate * t);
    case TimeEnvelope::Kind::Sine:
      return std::sin(env.rate * t);
    case TimeEnvelope::Kind::Exponential:
      return std::exp(env.rate * t);
  }
  throw ConfigError("expression: unknown time envelope kind");
}

Field evaluate_expression(const FieldExpression& expr,
                          std::shared_ptr<const Grid> grid, int channels,
                          Space out_space) {
  Field phys = zero_field(grid, channels, Space::Physical);
  for (const SpatialTerm& term : expr.terms) add_term(phys, term);
  return out_space == Space::Physical ? phys : forward(phys);
}

std::vector<Field> sample_forcing(const ForcingExpression& expr,
                                  std::shared_ptr<const Grid> grid,
                                  int channels,
                                  const std::vector<double>& times) {
  std::vector<Field> out;
  if (expr.empty()) return out;
  out.reserve(times.size());

  // Spatial factors are time-independent; evaluate each once.
  std::vector<Field> spatial;
  spatial.reserve(expr.terms.size());
  for (const ForcingTerm& term : expr.terms) {
    FieldExpression e;
    e.terms.push_back(term.spatial);
    spatial.push_back(evaluate_expression(e, grid, channels, Space::Physical));
  }

  for (double t : times) {
    Field snap = zero_field(grid, channels, Space::Physical);
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
      const double env = envelope_value(expr.terms[i].envelope, t);
      if (env == 0.0) continue;
      for (std::size_t j = 0; j < snap.data.size(); ++j)
        snap.data[j] += env * spatial[i].data[j];
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace nlwave
