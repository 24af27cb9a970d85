#include "nlwave/suites.hpp"

#include <algorithm>
#include <cmath>

#include "nlwave/errors.hpp"
#include "nlwave/linear_solver.hpp"
#include "nlwave/norms.hpp"

namespace nlwave {

namespace {

double normalized(cplx lhs, cplx rhs) {
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
}

bool real_nonnegative_spectrum(const OperatorFamily& fam) {
  for (Eigen::Index j = 0; j < fam.eigenvalues().size(); ++j) {
    const cplx lam = fam.eigenvalues()(j);
    if (std::abs(lam.imag()) > 1e-12 * (1.0 + std::abs(lam))) return false;
    if (lam.real() < -1e-12) return false;
  }
  return true;
}

// Effective forcing timeline the final linear solve saw: the external g
// minus the frozen nonlinearity (dealiased like the solver), or just g.
std::vector<Field> effective_forcing(const SolutionTimeline& sol,
                                     const NonlocalProblem& prob) {
  if (prob.nonlinearity.is_zero()) return prob.forcing;
  const int n = prob.family->dim();
  const std::size_t nt = sol.samples();
  std::vector<Field> out;
  out.reserve(nt);
  std::vector<cplx> fu(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < nt; ++k) {
    Field fk = zero_field(prob.grid, n, Space::Physical);
    for (std::size_t x = 0; x < prob.grid->modes(); ++x) {
      std::span<const cplx> ux(&sol.u[k].data[x * std::size_t(n)],
                               std::size_t(n));
      prob.nonlinearity.apply(ux, fu);
      for (int c = 0; c < n; ++c)
        fk.data[x * std::size_t(n) + std::size_t(c)] = fu[std::size_t(c)];
    }
    if (prob.dealias) {
      Field freq = forward(fk);
      for (std::size_t m = 0; m < prob.grid->modes(); ++m) {
        if (prob.grid->dealias_keep(m)) continue;
        for (int c = 0; c < n; ++c)
          freq.data[m * std::size_t(n) + std::size_t(c)] = 0.0;
      }
      fk = inverse(freq);
    }
    if (!prob.forcing.empty()) {
      for (std::size_t i = 0; i < fk.data.size(); ++i)
        fk.data[i] = prob.forcing[k].data[i] - fk.data[i];
    } else {
      for (cplx& v : fk.data) v = -v;
    }
    out.push_back(std::move(fk));
  }
  return out;
}

// Linear resample of a measure density onto the solver's grid times.
std::vector<cplx> resample_density(const std::vector<cplx>& density,
                                   double horizon,
                                   const std::vector<double>& times) {
  std::vector<cplx> out(times.size());
  const double src_dt = horizon / double(density.size() - 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    double pos = times[k] / src_dt;
    pos = std::clamp(pos, 0.0, double(density.size() - 1));
    const auto i0 =
        std::size_t(std::min(double(density.size() - 2), std::floor(pos)));
    const double f = pos - double(i0);
    out[k] = (1.0 - f) * density[i0] + f * density[i0 + 1];
  }
  return out;
}

double sup_abs(const Field& frequency_residual) {
  // Physical sup norm of the residual field.
  const Field phys = inverse(frequency_residual);
  double m = 0.0;
  for (const cplx& v : phys.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

IdentityReport identity_suite(const OperatorFamily& fam,
                              const std::vector<double>& xi2_list,
                              const std::vector<double>& t_list,
                              const IdentityOptions& opts) {
  IdentityReport rep;
  const double h = opts.fd_step;
  const bool growth_ok = real_nonnegative_spectrum(fam);
  rep.growth_checked = growth_ok;
  const double growth_cap = 1.01 * fam.eigvec_condition();

  for (double xi2 : xi2_list) {
    for (Eigen::Index j = 0; j < fam.eigenvalues().size(); ++j) {
      const cplx m2 = fam.eigenvalues()(j) + xi2;
      rep.c_at_zero =
          std::max(rep.c_at_zero, std::abs(cosine_scalar(m2, 0.0) - 1.0));
      rep.s_at_zero = std::max(rep.s_at_zero, std::abs(sine_scalar(m2, 0.0)));
      for (double t : t_list) {
        const cplx c = cosine_scalar(m2, t);
        const cplx s = sine_scalar(m2, t);
        rep.pythagorean =
            std::max(rep.pythagorean, normalized(c * c, 1.0 - m2 * s * s));
        const cplx fd_s =
            (sine_scalar(m2, t + h) - sine_scalar(m2, t - h)) / (2.0 * h);
        rep.s_derivative = std::max(rep.s_derivative, normalized(fd_s, c));
        const cplx fd_cc = (cosine_scalar(m2, t + h) - 2.0 * c +
                            cosine_scalar(m2, t - h)) /
                           (h * h);
        rep.c_second_derivative =
            std::max(rep.c_second_derivative, normalized(fd_cc, -m2 * c));
      }
    }
    if (growth_ok) {
      for (double t : t_list) {
        const double norm = cosine_operator_norm(fam, xi2, t);
        rep.growth_excess =
            std::max(rep.growth_excess, std::max(0.0, norm - growth_cap));
      }
    }
  }
  return rep;
}

ResidualReport residual_suite(const SolutionTimeline& sol,
                              const NonlocalProblem& prob) {
  prob.validate();
  if (sol.samples() != prob.time_steps + 1)
    throw ConfigError("residual suite: timeline does not match the problem");
  const Grid& grid = *prob.grid;
  const int n = prob.family->dim();
  const std::size_t nt = sol.samples();
  const double dt = prob.dt();

  ResidualReport rep;

  const std::vector<Field> g_eff = effective_forcing(sol, prob);

  // Frequency-space timelines (and forcing) for the equation residual.
  std::vector<Field> u_hat, g_hat;
  u_hat.reserve(nt);
  for (const Field& f : sol.u) u_hat.push_back(forward(f));
  g_hat.reserve(g_eff.size());
  for (const Field& f : g_eff) g_hat.push_back(forward(f));

  // 4th-order second time difference; interior samples 2..K-2.
  const Eigen::MatrixXcd a_dense = prob.family->dense();
  Eigen::VectorXcd stencil(n), au(n);
  if (nt >= 5) {
    rep.pde_timeline.assign(nt - 4, 0.0);
    for (std::size_t m = 0; m < grid.modes(); ++m) {
      const double xi2 = grid.xi_squared(m);
      for (std::size_t k = 2; k + 2 < nt; ++k) {
        for (int c = 0; c < n; ++c) {
          auto at = [&](std::size_t kk) {
            return u_hat[kk].data[m * std::size_t(n) + std::size_t(c)];
          };
          stencil(c) = (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) +
                        16.0 * at(k + 1) - at(k + 2)) /
                       (12.0 * dt * dt);
        }
        Eigen::VectorXcd uk(n);
        for (int c = 0; c < n; ++c)
          uk(c) = u_hat[k].data[m * std::size_t(n) + std::size_t(c)];
        au = a_dense * uk + xi2 * uk;
        for (int c = 0; c < n; ++c) {
          cplx r = stencil(c) + au(c);
          if (!g_hat.empty())
            r -= g_hat[k].data[m * std::size_t(n) + std::size_t(c)];
          const double ar = std::abs(r);
          rep.pde_max = std::max(rep.pde_max, ar);
          rep.pde_timeline[k - 2] = std::max(rep.pde_timeline[k - 2], ar);
        }
      }
    }
  }

  // Integral-condition residuals. The mild-formula evaluations need the
  // effective forcing, so hand evaluate_at_time a problem carrying it.
  NonlocalProblem eff = prob;
  eff.nonlinearity = Nonlinearity::none();
  eff.forcing = g_eff;

  Field int_u = zero_field(prob.grid, n, Space::Frequency);
  Field int_ut = zero_field(prob.grid, n, Space::Frequency);
  for (const TimeMeasure::Atom& a : prob.alpha.atoms()) {
    const auto pair_at = evaluate_at_time(eff, sol, a.location);
    for (std::size_t i = 0; i < int_u.data.size(); ++i)
      int_u.data[i] += a.weight * pair_at.first.data[i];
  }
  for (const TimeMeasure::Atom& b : prob.beta.atoms()) {
    const auto pair_at = evaluate_at_time(eff, sol, b.location);
    for (std::size_t i = 0; i < int_ut.data.size(); ++i)
      int_ut.data[i] += b.weight * pair_at.second.data[i];
  }
  if (!prob.alpha.density().empty()) {
    const std::vector<cplx> d =
        resample_density(prob.alpha.density(), prob.horizon, sol.times);
    for (std::size_t k = 0; k < nt; ++k) {
      const double w = (k == 0 || k + 1 == nt) ? 0.5 * dt : dt;
      const cplx wd = w * d[k];
      for (std::size_t i = 0; i < int_u.data.size(); ++i)
        int_u.data[i] += wd * u_hat[k].data[i];
    }
  }
  if (!prob.beta.density().empty()) {
    const std::vector<cplx> d =
        resample_density(prob.beta.density(), prob.horizon, sol.times);
    std::vector<Field> ut_hat;
    ut_hat.reserve(nt);
    for (const Field& f : sol.ut) ut_hat.push_back(forward(f));
    for (std::size_t k = 0; k < nt; ++k) {
      const double w = (k == 0 || k + 1 == nt) ? 0.5 * dt : dt;
      const cplx wd = w * d[k];
      for (std::size_t i = 0; i < int_ut.data.size(); ++i)
        int_ut.data[i] += wd * ut_hat[k].data[i];
    }
  }

  Field res_u = u_hat[0];
  const Field ut0_hat = forward(sol.ut[0]);
  Field res_ut = ut0_hat;
  for (std::size_t i = 0; i < res_u.data.size(); ++i) {
    res_u.data[i] -= prob.phi.data[i] + int_u.data[i];
    res_ut.data[i] -= prob.psi.data[i] + int_ut.data[i];
  }
  rep.condition_u = sup_abs(res_u);
  rep.condition_ut = sup_abs(res_ut);
  return rep;
}

EstimateReport estimate_monitor(const SolutionTimeline& sol,
                                const NonlocalProblem& prob,
                                const EstimateParams& params) {
  prob.validate();
  if (!(params.gamma >= 0.0 && params.gamma < 0.5))
    throw ConfigError("estimate monitor: gamma must lie in [0, 1/2)");
  const OperatorFamily& fam = *prob.family;
  const double s = params.s, p = params.p, q = params.q, sg = params.sigma;
  const double dt = prob.dt();
  const std::size_t nt = sol.samples();

  // Left-hand sides: max over time of the solution norms.
  double lhs_sup = 0.0, lhs_sob = 0.0, lhs_weighted = 0.0;
  for (std::size_t k = 0; k < nt; ++k) {
    const Field gu = apply_family_power(fam, params.gamma, sol.u[k]);
    const Field gut = apply_family_power(fam, params.gamma, sol.ut[k]);
    lhs_sup = std::max(lhs_sup, lp_norm(gu, inf_exponent, q) +
                                    lp_norm(gut, inf_exponent, q));
    lhs_sob = std::max(lhs_sob, sobolev_norm(gu, s, p, q) +
                                    sobolev_norm(gut, s, p, q));
    lhs_weighted =
        std::max(lhs_weighted, lp_norm(gu, inf_exponent, q, sg) +
                                   lp_norm(gut, inf_exponent, q, sg));
  }

  // Data norms.
  const Field phi_phys = inverse(prob.phi);
  const Field psi_phys = inverse(prob.psi);
  const Field a_phi = apply_family(fam, phi_phys);
  const Field a_psi = apply_family(fam, psi_phys);
  const Field h_psi = apply_family_power(fam, 0.5, psi_phys);

  const double sob_a_phi = sobolev_norm(a_phi, s, p, q);
  const double l1_a_phi = lp_norm(a_phi, 1.0, q);
  const double sob_a_psi = sobolev_norm(a_psi, s, p, q);
  const double l1_a_psi = lp_norm(a_psi, 1.0, q);
  const double sob_h_psi = sobolev_norm(h_psi, s, p, q);
  const double l1_h_psi = lp_norm(h_psi, 1.0, q);

  // Forcing integrals: trapezoid over the grid times of the named norms.
  double int_sob_lap_g = 0.0, int_l1_lap_g = 0.0;
  double int_sob_g = 0.0, int_l1_g = 0.0;
  double int_sob_lap_g_w = 0.0, int_l1_lap_g_w = 0.0;
  if (!prob.forcing.empty()) {
    for (std::size_t k = 0; k < nt; ++k) {
      const double w = (k == 0 || k + 1 == nt) ? 0.5 * dt : dt;
      const Field g_hat = forward(prob.forcing[k]);
      const Field lap_g = inverse(laplacian_multiplier(g_hat));
      int_sob_lap_g += w * sobolev_norm(lap_g, s, p, q);
      int_l1_lap_g += w * lp_norm(lap_g, 1.0, q);
      int_sob_g += w * sobolev_norm(prob.forcing[k], s, p, q);
      int_l1_g += w * lp_norm(prob.forcing[k], 1.0, q);
      int_sob_lap_g_w += w * sobolev_norm(lap_g, s, p, q, sg);
      int_l1_lap_g_w += w * lp_norm(lap_g, 1.0, q, sg);
    }
  }

  auto entry = [](double lhs, double rhs) {
    EstimateEntry e;
    e.lhs = lhs;
    e.rhs = rhs;
    e.applicable = rhs > 0.0 && std::isfinite(lhs);
    e.ratio = e.applicable ? lhs / rhs : 0.0;
    return e;
  };

  EstimateReport rep;
  rep.sup_laplacian_g =
      entry(lhs_sup, sob_a_phi + l1_a_phi + sob_a_psi + l1_a_psi +
                         int_sob_lap_g + int_l1_lap_g);
  rep.sup_plain_g = entry(lhs_sup, sob_a_phi + l1_a_phi + sob_a_psi +
                                       l1_a_psi + int_sob_g + int_l1_g);
  rep.sup_sqrt_psi = entry(lhs_sup, sob_a_phi + l1_a_phi + sob_h_psi +
                                        l1_h_psi + int_sob_lap_g +
                                        int_l1_lap_g);
  rep.sobolev_uniform =
      entry(lhs_sob, sob_a_phi + sob_a_psi + int_sob_lap_g);
  rep.weighted_lq = entry(
      lhs_weighted,
      sobolev_norm(a_phi, s, p, q, sg) + lp_norm(a_phi, 1.0, q, sg) +
          sobolev_norm(a_psi, s, p, q, 0.5 * sg) +
          lp_norm(a_psi, 1.0, q, 0.5 * sg) + int_sob_lap_g_w +
          int_l1_lap_g_w);
  return rep;
}

}  // namespace nlwave
