#include "nlwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlwave/errors.hpp"

namespace nlwave {

double lq_norm(std::span<const cplx> v, double q) {
  if (q < 1.0) throw ConfigError("lq_norm: q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (const cplx& x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double acc = 0.0;
  for (const cplx& x : v) acc += std::pow(std::abs(x), q);
  return std::pow(acc, 1.0 / q);
}

double lq_sigma_norm(std::span<const cplx> v, double q, double sigma) {
  if (sigma == 0.0) return lq_norm(v, q);
  if (std::isinf(q))
    throw ConfigError("lq_sigma_norm: q = inf requires sigma = 0");
  if (q < 1.0) throw ConfigError("lq_sigma_norm: q must be >= 1");
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    acc += std::exp2(sigma * double(j + 1)) * std::pow(std::abs(v[j]), q);
  return std::pow(acc, 1.0 / q);
}

double lp_norm(const Field& physical, double p, double q, double sigma) {
  if (physical.space != Space::Physical)
    throw ConfigError("lp_norm: field must be in physical space");
  const Grid& g = *physical.grid;
  const int nc = physical.channels;
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.modes(); ++k) {
      std::span<const cplx> pt(&physical.data[k * nc], std::size_t(nc));
      m = std::max(m, lq_sigma_norm(pt, q, sigma));
    }
    return m;
  }
  if (p < 1.0) throw ConfigError("lp_norm: p must be >= 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < g.modes(); ++k) {
    std::span<const cplx> pt(&physical.data[k * nc], std::size_t(nc));
    acc += std::pow(lq_sigma_norm(pt, q, sigma), p);
  }
  return std::pow(g.cell_volume() * acc, 1.0 / p);
}

Field sobolev_multiplier(const Field& frequency, double s) {
  if (frequency.space != Space::Frequency)
    throw ConfigError("sobolev_multiplier: field must be in frequency space");
  Field out = frequency;
  const Grid& g = *out.grid;
  const int nc = out.channels;
  for (std::size_t k = 0; k < g.modes(); ++k) {
    const double w = std::pow(1.0 + g.xi_squared(k), 0.5 * s);
    for (int c = 0; c < nc; ++c) out.data[k * nc + c] *= w;
  }
  return out;
}

Field laplacian_multiplier(const Field& frequency) {
  if (frequency.space != Space::Frequency)
    throw ConfigError("laplacian_multiplier: field must be in frequency space");
  Field out = frequency;
  const Grid& g = *out.grid;
  const int nc = out.channels;
  for (std::size_t k = 0; k < g.modes(); ++k) {
    const double w = -g.xi_squared(k);
    for (int c = 0; c < nc; ++c) out.data[k * nc + c] *= w;
  }
  return out;
}

double sobolev_norm(const Field& f, double s, double p, double q,
                    double sigma) {
  Field freq = (f.space == Space::Frequency) ? f : forward(f);
  Field weighted = sobolev_multiplier(freq, s);
  return lp_norm(inverse(weighted), p, q, sigma);
}

Field apply_family(const OperatorFamily& fam, const Field& physical) {
  if (physical.channels != fam.dim())
    throw ConfigError("apply_family: channel count does not match operator");
  Field out = physical;
  const int nc = out.channels;
  std::vector<cplx> buf(static_cast<std::size_t>(nc));
  for (std::size_t k = 0; k < out.grid->modes(); ++k) {
    cplx* pt = &out.data[k * nc];
    fam.apply(pt, buf.data());
    std::copy(buf.begin(), buf.end(), pt);
  }
  return out;
}

Field apply_family_power(const OperatorFamily& fam, double gamma,
                         const Field& physical) {
  if (physical.channels != fam.dim())
    throw ConfigError(
        "apply_family_power: channel count does not match operator");
  Field out = physical;
  const int nc = out.channels;
  std::vector<cplx> buf(static_cast<std::size_t>(nc));
  for (std::size_t k = 0; k < out.grid->modes(); ++k) {
    cplx* pt = &out.data[k * nc];
    fam.apply_power(0.0, gamma, pt, buf.data());
    std::copy(buf.begin(), buf.end(), pt);
  }
  return out;
}

double y_norm(const std::vector<Field>& samples, const OperatorFamily& fam,
              double s, double p, double q) {
  double sob = 0.0;
  double graph = 0.0;
  for (const Field& f : samples) {
    const Field* phys = &f;
    Field tmp;
    if (f.space != Space::Physical) {
      tmp = inverse(f);
      phys = &tmp;
    }
    sob = std::max(sob, sobolev_norm(*phys, s, p, q));
    Field au = apply_family(fam, *phys);
    graph = std::max(graph, lp_norm(au, inf_exponent, q));
  }
  return sob + graph;
}

}  // namespace nlwave
