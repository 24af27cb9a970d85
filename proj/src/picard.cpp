#include "nlwave/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlwave/errors.hpp"
#include "nlwave/linear_solver.hpp"
#include "nlwave/norms.hpp"
#include "nlwave/rng.hpp"

namespace nlwave {

namespace {

// Central-difference estimate of the max derivative norm (orders 1 and 2)
// of F over the ball |u|_inf <= radius, on the sample stream named by seed.
double sampled_derivative_bound(const Nonlinearity& f, double radius, int dim,
                                std::uint64_t seed) {
  const int orders = std::min(f.smoothness(), 2);
  const double h = std::max(1e-6, 1e-6 * radius);
  Rng rng(seed);

  std::vector<std::vector<cplx>> samples;
  // Per-channel real boundary samples (the power law's derivative envelope
  // peaks on the real axis at |u| = radius).
  for (int c = 0; c < dim; ++c) {
    std::vector<cplx> u(std::size_t(dim), cplx(0.0));
    u[std::size_t(c)] = radius;
    samples.push_back(std::move(u));
  }
  samples.push_back(std::vector<cplx>(std::size_t(dim), cplx(0.0)));
  while (samples.size() < 256) {
    std::vector<cplx> u(static_cast<std::size_t>(dim));
    double sup = 0.0;
    for (int c = 0; c < dim; ++c) {
      u[std::size_t(c)] = rng.normal_complex();
      sup = std::max(sup, std::abs(u[std::size_t(c)]));
    }
    const double scale =
        radius * rng.uniform() / std::max(sup, 1e-300);
    for (cplx& x : u) x *= scale;
    samples.push_back(std::move(u));
  }

  std::vector<cplx> up(static_cast<std::size_t>(dim)), um(static_cast<std::size_t>(dim));
  std::vector<cplx> fp(static_cast<std::size_t>(dim)), fm(static_cast<std::size_t>(dim)),
      f0(static_cast<std::size_t>(dim));
  double bound = 0.0;
  for (const std::vector<cplx>& u : samples) {
    for (int c = 0; c < dim; ++c) {
      up = u;
      um = u;
      up[std::size_t(c)] += h;
      um[std::size_t(c)] -= h;
      f.apply(up, fp);
      f.apply(um, fm);
      double col1 = 0.0;
      for (int r = 0; r < dim; ++r)
        col1 = std::max(col1, std::abs(fp[std::size_t(r)] - fm[std::size_t(r)]) /
                                  (2.0 * h));
      bound = std::max(bound, col1);
      if (orders >= 2) {
        f.apply(u, f0);
        double col2 = 0.0;
        for (int r = 0; r < dim; ++r)
          col2 = std::max(
              col2, std::abs(fp[std::size_t(r)] - 2.0 * f0[std::size_t(r)] +
                             fm[std::size_t(r)]) /
                        (h * h));
        bound = std::max(bound, col2);
      }
    }
  }
  return bound;
}

Field dealias_spectrum(const Field& physical) {
  Field freq = forward(physical);
  const Grid& g = *freq.grid;
  const int nc = freq.channels;
  for (std::size_t m = 0; m < g.modes(); ++m) {
    if (g.dealias_keep(m)) continue;
    for (int c = 0; c < nc; ++c) freq.data[m * std::size_t(nc) + c] = 0.0;
  }
  return inverse(freq);
}

double blow_norm(const SolutionTimeline& sol, const OperatorFamily& fam,
                 double s, double p, double q) {
  const double yu = y_norm(sol.u, fam, s, p, q);
  const double yut = y_norm(sol.ut, fam, s, p, q);
  return yu + yut;
}

std::string window_guidance(double t_user, double window) {
  std::ostringstream msg;
  msg << "horizon " << t_user << " exceeds the proven contraction window "
      << window
      << "; shrink the problem horizon (the measures' horizon is part of the "
         "problem statement) or set allow_unproven_window to attempt the "
         "solve with monitoring";
  return msg.str();
}

}  // namespace

double fbar_estimate(const Nonlinearity& f, double radius, int dim,
                     std::uint64_t sample_seed) {
  if (radius < 0.0) throw ConfigError("fbar: radius must be >= 0");
  if (f.is_zero()) return 0.0;
  if (f.derivative_bound()) return f.derivative_bound()(radius);
  if (f.is_power_law()) {
    // max over orders j <= k of |lambda| p (p-1) ... (p-j+1) radius^(p-j).
    const double lam = std::abs(f.lambda());
    const double p = f.exponent();
    double coeff = lam;
    double best = 0.0;
    for (int j = 1; j <= f.smoothness(); ++j) {
      coeff *= (p - double(j - 1));
      const double expo = p - double(j);
      const double term = std::abs(coeff) *
                          (expo == 0.0 ? 1.0 : std::pow(radius, expo));
      best = std::max(best, term);
    }
    return best;
  }
  if (f.smoothness() > 2)
    throw ConfigError(
        "fbar: sampling covers derivative orders <= 2; provide a derivative "
        "bound callback for higher smoothness");
  return sampled_derivative_bound(f, radius, dim, sample_seed);
}

double select_window(double m_norm, double fbar, double c0, double c1,
                     double t_user) {
  if (m_norm < 0.0 || fbar < 0.0)
    throw ConfigError("select_window: M and fbar must be >= 0");
  const double m1 = m_norm + 1.0;
  const double b1 = 1.0 / (m1 * (1.0 + 2.0 * c0 * m1 * fbar));
  const double b2 = 0.5 / (1.0 + c1 * m1 * m1 * fbar);
  return std::min(t_user, std::min(b1, b2));
}

SolutionTimeline apply_G(const NonlocalProblem& prob,
                         const SolutionTimeline& u_k) {
  const std::size_t nt = prob.time_steps + 1;
  if (u_k.samples() != nt)
    throw ConfigError("apply_G: iterate timeline does not match the grid");

  NonlocalProblem lin = prob;
  lin.nonlinearity = Nonlinearity::none();
  if (!prob.nonlinearity.is_zero()) {
    const int n = prob.family->dim();
    std::vector<Field> forcing;
    forcing.reserve(nt);
    std::vector<cplx> fu(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < nt; ++k) {
      Field fk = zero_field(prob.grid, n, Space::Physical);
      for (std::size_t x = 0; x < prob.grid->modes(); ++x) {
        std::span<const cplx> ux(&u_k.u[k].data[x * std::size_t(n)],
                                 std::size_t(n));
        prob.nonlinearity.apply(ux, fu);
        for (int c = 0; c < n; ++c)
          fk.data[x * std::size_t(n) + std::size_t(c)] = fu[std::size_t(c)];
      }
      if (prob.dealias) fk = dealias_spectrum(fk);
      if (!prob.forcing.empty()) {
        for (std::size_t i = 0; i < fk.data.size(); ++i)
          fk.data[i] = prob.forcing[k].data[i] - fk.data[i];
      } else {
        for (cplx& v : fk.data) v = -v;
      }
      forcing.push_back(std::move(fk));
    }
    lin.forcing = std::move(forcing);
  }
  return solve_linear(lin);
}

double timeline_distance(const SolutionTimeline& a, const SolutionTimeline& b,
                         const OperatorFamily& fam, double s, double p,
                         double q) {
  if (a.samples() != b.samples())
    throw ConfigError("timeline_distance: sample counts differ");
  std::vector<Field> diff;
  diff.reserve(a.samples());
  for (std::size_t k = 0; k < a.samples(); ++k) {
    Field d = a.u[k];
    for (std::size_t i = 0; i < d.data.size(); ++i)
      d.data[i] -= b.u[k].data[i];
    diff.push_back(std::move(d));
  }
  return y_norm(diff, fam, s, p, q);
}

std::pair<SolutionTimeline, PicardReport> solve_nonlinear(
    const NonlocalProblem& prob, const PicardOptions& opts) {
  prob.validate();
  const OperatorFamily& fam = *prob.family;
  const double s = opts.norm_s, p = opts.norm_p, q = opts.norm_q;

  PicardReport rep;
  {
    const Field phi_phys = inverse(prob.phi);
    const Field psi_phys = inverse(prob.psi);
    const Field a_phi = apply_family(fam, phi_phys);
    const Field a_psi = apply_family(fam, psi_phys);
    rep.data_norm_M = sobolev_norm(a_phi, s, p, q) +
                      lp_norm(a_phi, inf_exponent, q) +
                      sobolev_norm(a_psi, s, p, q) +
                      lp_norm(a_psi, inf_exponent, q);
  }
  rep.fbar = fbar_estimate(prob.nonlinearity, rep.data_norm_M + 1.0,
                           fam.dim(), opts.sample_seed);
  rep.selected_window =
      select_window(rep.data_norm_M, rep.fbar, opts.c0, opts.c1, prob.horizon);
  rep.window_binds =
      rep.selected_window < prob.horizon * (1.0 - 1e-12);
  if (rep.window_binds && !prob.nonlinearity.is_zero() &&
      !opts.allow_unproven_window)
    throw SolveError(window_guidance(prob.horizon, rep.selected_window));

  // First iterate: the linear solve with the external forcing only.
  NonlocalProblem lin = prob;
  lin.nonlinearity = Nonlinearity::none();
  SolutionTimeline u = solve_linear(lin);
  rep.max_blow_norm = blow_norm(u, fam, s, p, q);

  int sustained = 0;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    SolutionTimeline next = apply_G(prob, u);
    const double delta = timeline_distance(next, u, fam, s, p, q);
    rep.deltas.push_back(delta);
    if (rep.deltas.size() >= 2) {
      const double prev = rep.deltas[rep.deltas.size() - 2];
      const double rho = prev > 0.0
                             ? delta / prev
                             : (delta > 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : 0.0);
      rep.rhos.push_back(rho);
      sustained = rho >= 1.0 ? sustained + 1 : 0;
      if (sustained >= 5)
        throw NonContraction(rho, k,
                             "picard: increment ratios >= 1 sustained for 5 "
                             "iterations (no contraction on this window)");
    }
    u = std::move(next);
    rep.iterations = k;

    const double bn = blow_norm(u, fam, s, p, q);
    rep.max_blow_norm = std::max(rep.max_blow_norm, bn);
    if (bn > opts.blowup_ceiling)
      throw BlowupSuspected(bn, k,
                            "picard: solution norms crossed the blowup "
                            "ceiling");

    rep.stopping_threshold = opts.atol + opts.rtol * y_norm(u.u, fam, s, p, q);
    if (delta <= rep.stopping_threshold) {
      rep.status = "converged";
      return {std::move(u), std::move(rep)};
    }
  }
  // Cap reached with ratios still < 1: not an error, but not converged;
  // the caller decides from the status.
  rep.status = "max_iterations";
  return {std::move(u), std::move(rep)};
}

namespace {

// Never leave a remainder shorter than the 8-step validity floor behind.
std::size_t avoid_short_remainder(std::size_t span, std::size_t remaining) {
  if (remaining > span && remaining - span < 8)
    return remaining >= 16 ? remaining - 8 : remaining;
  return span;
}

}  // namespace

SolutionTimeline extend_solution(const NonlocalProblem& prob,
                                 const SolutionTimeline& sol, double extra_T,
                                 const PicardOptions& opts) {
  if (extra_T == 0.0) return sol;
  if (extra_T < 0.0) throw ConfigError("extend: extra_T must be >= 0");
  if (!prob.forcing.empty())
    throw ConfigError(
        "extend: sampled external forcing is defined only up to the horizon "
        "and cannot extend");
  const double dt = prob.dt();
  const double steps_real = extra_T / dt;
  auto remaining = std::size_t(std::llround(steps_real));
  if (std::abs(steps_real - double(remaining)) > 1e-9 || remaining == 0)
    throw ConfigError("extend: extra_T must be a whole number of time steps");
  if (remaining < 8)
    throw ConfigError("extend: extra_T must span at least 8 time steps");

  SolutionTimeline glued = sol;
  double t_end = sol.times.back();

  while (remaining > 0) {
    // Span: the proven window for the current endpoint data, snapped to
    // whole steps and floored at 8 (linear problems take the whole span).
    std::size_t span_steps = remaining;
    if (!prob.nonlinearity.is_zero()) {
      const Field a_phi = apply_family(*prob.family, glued.u.back());
      const Field a_psi = apply_family(*prob.family, glued.ut.back());
      const double m_norm =
          sobolev_norm(a_phi, opts.norm_s, opts.norm_p, opts.norm_q) +
          lp_norm(a_phi, inf_exponent, opts.norm_q) +
          sobolev_norm(a_psi, opts.norm_s, opts.norm_p, opts.norm_q) +
          lp_norm(a_psi, inf_exponent, opts.norm_q);
      const double fbar = fbar_estimate(prob.nonlinearity, m_norm + 1.0,
                                        prob.family->dim(), opts.sample_seed);
      const double proven = select_window(m_norm, fbar, opts.c0, opts.c1,
                                          double(remaining) * dt);
      span_steps = std::min(
          remaining,
          std::max<std::size_t>(8, std::size_t(std::floor(proven / dt))));
    }
    span_steps = avoid_short_remainder(span_steps, remaining);

    SolutionTimeline piece;
    int halvings = 0;
    for (;;) {
      NonlocalProblem window = prob;
      window.time_steps = span_steps;
      window.horizon = double(span_steps) * dt;
      window.alpha = TimeMeasure::zero(window.horizon);
      window.beta = TimeMeasure::zero(window.horizon);
      window.phi = forward(glued.u.back());
      window.psi = forward(glued.ut.back());
      window.forcing.clear();
      PicardOptions wopts = opts;
      wopts.allow_unproven_window = true;  // span already chosen; monitored
      try {
        piece = solve_nonlinear(window, wopts).first;
        break;
      } catch (const NonContraction&) {
        if (halvings >= 4 || span_steps <= 8) throw;
        ++halvings;
        span_steps =
            avoid_short_remainder(std::max<std::size_t>(8, span_steps / 2),
                                  remaining);
      }
    }

    // Gluing: the window's t=0 sample duplicates the current endpoint.
    for (std::size_t k = 1; k < piece.samples(); ++k) {
      glued.times.push_back(t_end + piece.times[k]);
      glued.u.push_back(std::move(piece.u[k]));
      glued.ut.push_back(std::move(piece.ut[k]));
    }
    t_end = glued.times.back();
    remaining -= span_steps;
  }
  return glued;
}

}  // namespace nlwave
