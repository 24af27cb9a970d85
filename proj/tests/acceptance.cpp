// Acceptance gate: end-to-end checks of the library's external contract.
// Each criterion prints exactly one PASS/FAIL line; the exit code is 0 only
// when every criterion passes. Stated wall-clock budgets are part of the
// respective criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nlwave/errors.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/linear_solver.hpp"
#include "nlwave/norms.hpp"
#include "nlwave/operator_family.hpp"
#include "nlwave/oracle.hpp"
#include "nlwave/picard.hpp"
#include "nlwave/problem.hpp"
#include "nlwave/report.hpp"
#include "nlwave/rng.hpp"
#include "nlwave/runner.hpp"
#include "nlwave/scenario.hpp"
#include "nlwave/suites.hpp"
#include "nlwave/time_measure.hpp"
#include "nlwave/timeline.hpp"

namespace {

using namespace nlwave;
using clock_type = std::chrono::steady_clock;

constexpr double kPi = 3.141592653589793;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

std::string scenario_path(const char* file) {
  return std::string(NLWAVE_SCENARIO_DIR) + "/" + file;
}

std::shared_ptr<const Grid> grid1d(int points) {
  return std::make_shared<Grid>(1, points, 2.0 * kPi);
}

Field gaussian_phys(std::shared_ptr<const Grid> g, double amp, double center,
                    double width) {
  Field f = zero_field(g, 1, Space::Physical);
  for (std::size_t i = 0; i < g->modes(); ++i) {
    const double x = g->coords(i)[0];
    const double r = (x - center) / width;
    f.data[i] = amp * std::exp(-0.5 * r * r);
  }
  return f;
}

Field random_freq(std::shared_ptr<const Grid> g, int channels, Rng& rng,
                  double decay) {
  Field f = zero_field(g, channels, Space::Frequency);
  for (std::size_t m = 0; m < g->modes(); ++m) {
    const double k = double(g->mode_index(m, 0));
    const double w = std::exp(-(k * k) / (decay * decay));
    for (int c = 0; c < channels; ++c) f.at(m, c) = w * rng.normal_complex();
  }
  return f;
}

// Physical forcing timeline g(x, t_k) = profile(x) * cos(rate t_k).
std::vector<Field> envelope_forcing(const Field& profile, std::size_t steps,
                                    double horizon, double rate) {
  std::vector<Field> out;
  out.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = horizon * double(k) / double(steps);
    Field f = profile;
    const cplx env(std::cos(rate * t));
    for (cplx& v : f.data) v *= env;
    out.push_back(std::move(f));
  }
  return out;
}

struct Gate {
  int failed = 0;

  void report(int num, const char* name, bool pass, double ms,
              const std::string& detail) {
    std::printf("%s  criterion %2d  %-22s  %8.0f ms  %s\n",
                pass ? "PASS" : "FAIL", num, name, ms, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

template <class Fn>
void run_criterion(Gate& gate, int num, const char* name, Fn fn) {
  const auto t0 = clock_type::now();
  bool pass = false;
  std::string detail;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = fmt("exception: %s", e.what());
    pass = false;
  }
  gate.report(num, name, pass, ms_since(t0), detail);
}

// --- 1: kernel identities across the operator family zoo ------------------

bool criterion_identities(std::string& detail) {
  const auto t0 = clock_type::now();
  const std::vector<double> xi2 = {0.0, 1.0, 10.0};
  const std::vector<double> ts = {0.0, 0.1, 1.0, kPi};

  double pyth = 0.0, sder = 0.0, csec = 0.0, at_zero = 0.0, growth = 0.0;
  auto fold = [&](const OperatorFamily& fam) {
    const IdentityReport r = identity_suite(fam, xi2, ts);
    at_zero = std::max({at_zero, r.c_at_zero, r.s_at_zero});
    pyth = std::max(pyth, r.pythagorean);
    sder = std::max(sder, r.s_derivative);
    csec = std::max(csec, r.c_second_derivative);
    growth = std::max(growth, r.growth_excess);
  };

  fold(OperatorFamily::scalar(0.0));
  fold(OperatorFamily::scalar(1.0));
  fold(OperatorFamily::scalar(3.0));

  Eigen::VectorXcd diag(4);
  diag << 0.0, 1.0, 2.5, 7.0;
  fold(OperatorFamily::diagonal(diag));

  // Random diagonalizable 4x4: mild eigenvector skew around fixed spectrum.
  Rng rng(0x1d5u);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) v(r, c) += 0.3 * rng.normal();
  Eigen::VectorXcd spec(4);
  spec << 0.3, 1.7, 4.2, 9.1;
  fold(OperatorFamily::matrix(v * spec.asDiagonal() * v.inverse()));

  // Boundary-coefficient family, 33 nodes: a(y) = 0.05 (1+y), b(y) = 0.1 (1-y).
  const int m = 32;
  std::vector<double> as(m + 1), bs(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double y = double(i) / double(m);
    as[std::size_t(i)] = 0.05 * (1.0 + y);
    bs[std::size_t(i)] = 0.1 * (1.0 - y);
  }
  fold(build_wentzell(as, bs));

  const double ms = ms_since(t0);
  const bool ok = at_zero <= 1e-12 && pyth <= 1e-10 && sder <= 1e-6 &&
                  csec <= 1e-6 && growth == 0.0 && ms < 5000.0;
  detail = fmt("6 families: at0 %.1e  pyth %.1e  s' %.1e  c'' %.1e", at_zero,
               pyth, sder, csec);
  return ok;
}

// --- 2: plane wave reproduced to near machine precision --------------------

bool criterion_planewave(std::string& detail) {
  const auto t0 = clock_type::now();
  const Scenario sc = load_scenario(scenario_path("planewave-linear.json"));
  const NonlocalProblem prob = sc.build_problem();
  const SolutionTimeline sol = solve_linear(prob);

  // phi = e^{ix}, psi = 0, A = 3: u(x,t) = cos(2t) e^{ix}.
  const Grid& g = *prob.grid;
  double err = 0.0;
  for (std::size_t k = 0; k < sol.samples(); ++k) {
    const double t = sol.times[k];
    const double amp = std::cos(2.0 * t);
    for (std::size_t i = 0; i < g.modes(); ++i) {
      const double x = g.coords(i)[0];
      const cplx expect = amp * std::exp(cplx(0.0, x));
      err = std::max(err, std::abs(sol.u[k].data[i] - expect));
    }
  }
  const double ms = ms_since(t0);
  detail = fmt("max |u - cos(2t)e^{ix}| = %.2e", err);
  return err <= 1e-10 && ms < 1000.0;
}

// --- 3: manufactured solution under both integral conditions ---------------

bool criterion_manufactured(std::string& detail) {
  auto grid = grid1d(64);
  auto fam = std::make_shared<const OperatorFamily>(OperatorFamily::scalar(3.0));
  const double horizon = 1.0;
  const double mu = 2.0;  // sqrt(3 + 1) at wave mode 1
  const cplx w_alpha(0.25), w_beta(-0.2);
  const double t_alpha = 0.4, t_beta = 0.7;

  // Target u*(x,t) = cos(mu t) e^{ix}; data chosen so that both integral
  // conditions hold for it exactly.
  const double root_p = 8.0;  // forward transform of a unit plane wave
  NonlocalProblem prob;
  prob.grid = grid;
  prob.family = fam;
  prob.horizon = horizon;
  prob.time_steps = 256;
  prob.alpha = TimeMeasure(horizon, {{t_alpha, w_alpha}}, {});
  prob.beta = TimeMeasure(horizon, {{t_beta, w_beta}}, {});
  prob.phi = zero_field(grid, 1, Space::Frequency);
  prob.psi = zero_field(grid, 1, Space::Frequency);
  prob.phi.at(1, 0) = root_p * (1.0 - w_alpha * std::cos(mu * t_alpha));
  prob.psi.at(1, 0) = -w_beta * (-mu * std::sin(mu * t_beta)) * root_p;
  prob.validate();

  const SolutionTimeline sol = solve_linear(prob);
  double err = 0.0;
  for (std::size_t k = 0; k < sol.samples(); ++k) {
    const double amp = std::cos(mu * sol.times[k]);
    for (std::size_t i = 0; i < grid->modes(); ++i) {
      const double x = grid->coords(i)[0];
      const cplx expect = amp * std::exp(cplx(0.0, x));
      err = std::max(err, std::abs(sol.u[k].data[i] - expect));
    }
  }
  const ResidualReport res = residual_suite(sol, prob);
  detail = fmt("pointwise %.2e  cond_u %.2e  cond_ut %.2e", err,
               res.condition_u, res.condition_ut);
  return err <= 1e-10 && res.condition_u <= 1e-10 && res.condition_ut <= 1e-10;
}

// --- 4: random instances vs the brute-force reference ----------------------

TimeMeasure draw_mixed_measure(Rng& rng, double horizon) {
  std::vector<TimeMeasure::Atom> atoms;
  const int n = rng.uniform() < 0.4 ? 2 : 1;
  for (int i = 0; i < n; ++i)
    atoms.push_back({rng.uniform(0.05 * horizon, 0.95 * horizon),
                     cplx(rng.uniform(-0.12, 0.12))});
  std::vector<cplx> density(17);
  const double amp = rng.uniform(-0.1, 0.1) / horizon;
  for (std::size_t q = 0; q < density.size(); ++q)
    density[q] = amp * std::sin(kPi * double(q) / 16.0);
  return TimeMeasure(horizon, std::move(atoms), std::move(density));
}

bool criterion_oracle(std::string& detail) {
  const auto t0 = clock_type::now();
  Rng rng(0xc4u);
  double worst = 0.0;
  std::size_t worst_instance = 0;

  for (std::size_t i = 0; i < 20; ++i) {
    auto grid = grid1d(rng.uniform() < 0.5 ? 8 : 16);
    std::shared_ptr<const OperatorFamily> fam;
    int channels = 1;
    switch (i % 3) {
      case 0:
        fam = std::make_shared<const OperatorFamily>(
            OperatorFamily::scalar(rng.uniform(0.2, 3.0)));
        break;
      case 1: {
        Eigen::VectorXcd d(2);
        d << rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0);
        fam = std::make_shared<const OperatorFamily>(OperatorFamily::diagonal(d));
        channels = 2;
        break;
      }
      default: {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(2, 2);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) v(r, c) += 0.3 * rng.normal();
        Eigen::VectorXcd d(2);
        d << rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0);
        fam = std::make_shared<const OperatorFamily>(
            OperatorFamily::matrix(v * d.asDiagonal() * v.inverse()));
        channels = 2;
        break;
      }
    }
    const double horizon = rng.uniform(0.8, 1.5);

    TimeMeasure alpha = draw_mixed_measure(rng, horizon);
    TimeMeasure beta = draw_mixed_measure(rng, horizon);
    int guard = 0;
    while (invertibility_margin(alpha, beta) <= 0.2 && guard++ < 200) {
      alpha = draw_mixed_measure(rng, horizon);
      beta = draw_mixed_measure(rng, horizon);
    }
    if (guard >= 200) {
      detail = "margin rejection sampling failed to find margin > 0.2";
      return false;
    }

    NonlocalProblem prob;
    prob.grid = grid;
    prob.family = fam;
    prob.horizon = horizon;
    prob.time_steps = 128;
    prob.alpha = std::move(alpha);
    prob.beta = std::move(beta);
    prob.phi = random_freq(grid, channels, rng, 3.0);
    prob.psi = random_freq(grid, channels, rng, 3.0);
    if (i % 4 == 0) {
      Field profile = zero_field(grid, channels, Space::Physical);
      for (std::size_t m = 0; m < grid->modes(); ++m) {
        const double x = grid->coords(m)[0];
        for (int c = 0; c < channels; ++c)
          profile.at(m, c) = 0.3 * std::cos(x);
      }
      prob.forcing = envelope_forcing(profile, prob.time_steps, horizon, 1.3);
    }
    prob.validate();

    const SolutionTimeline sol = solve_linear(prob);
    const OracleComparison cmp = compare_with_oracle(prob, sol, 16, 64);
    if (cmp.modes_checked != grid->modes()) {
      detail = fmt("instance %zu checked %zu of %zu modes", i,
                   cmp.modes_checked, grid->modes());
      return false;
    }
    if (cmp.max_rel_error > worst) {
      worst = cmp.max_rel_error;
      worst_instance = i;
    }
  }
  const double ms = ms_since(t0);
  detail = fmt("20 instances: worst rel %.2e (instance %zu)", worst,
               worst_instance);
  return worst <= 1e-6 && ms < 30000.0;
}

// --- 5: invertibility margin lower-bounds every mode modulus ---------------

struct DrawnMeasure {
  TimeMeasure m;
  cplx total;
  double abs_total;
};

DrawnMeasure draw_margin_measure(Rng& rng, double horizon) {
  std::vector<TimeMeasure::Atom> atoms;
  cplx total(0.0);
  double abs_total = 0.0;
  const int n = rng.uniform() < 0.5 ? 2 : 1;
  for (int i = 0; i < n; ++i) {
    const cplx w(rng.uniform(-0.2, 0.2));
    atoms.push_back({rng.uniform(0.0, horizon), w});
    total += w;
    abs_total += std::abs(w);
  }
  std::vector<cplx> density;
  if (rng.uniform() < 0.5) {
    const cplx c(rng.uniform(-0.15, 0.15));
    density.assign(9, c);
    total += c * horizon;
    abs_total += std::abs(c) * horizon;
  }
  return {TimeMeasure(horizon, std::move(atoms), std::move(density)), total,
          abs_total};
}

bool criterion_margin(std::string& detail) {
  Rng rng(0x5a5au);
  auto grid = grid1d(16);
  auto fam = std::make_shared<const OperatorFamily>(OperatorFamily::scalar(1.0));

  int accepted = 0, draws = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  while (accepted < 50 && draws++ < 5000) {
    const DrawnMeasure a = draw_margin_measure(rng, 1.0);
    const DrawnMeasure b = draw_margin_measure(rng, 1.0);
    // Independent margin arithmetic from the drawn weights themselves.
    const double m_ind = std::abs(1.0 + a.total * b.total) -
                         (a.abs_total + b.abs_total);
    if (m_ind <= 0.0) continue;
    ++accepted;

    NonlocalProblem prob;
    prob.grid = grid;
    prob.family = fam;
    prob.horizon = 1.0;
    prob.time_steps = 8;
    prob.alpha = a.m;
    prob.beta = b.m;
    prob.phi = zero_field(grid, 1, Space::Frequency);
    prob.psi = zero_field(grid, 1, Space::Frequency);
    prob.validate();

    const InvertibilityReport rep = check_O_invertibility(prob);
    if (std::abs(rep.margin - m_ind) > 1e-12 * (1.0 + std::abs(m_ind))) {
      detail = fmt("margin %.17g disagrees with drawn-weight value %.17g",
                   rep.margin, m_ind);
      return false;
    }
    if (rep.bound != 1.0 / rep.margin) {
      detail = fmt("bound %.17g != 1/margin %.17g", rep.bound,
                   1.0 / rep.margin);
      return false;
    }
    min_gap = std::min(min_gap, rep.min_O_modulus - (rep.margin - 1e-9));
    if (rep.min_O_modulus < rep.margin - 1e-9) {
      detail = fmt("pair %d: min |O| %.3e under margin %.3e", accepted,
                   rep.min_O_modulus, rep.margin);
      return false;
    }
  }
  if (accepted < 50) {
    detail = fmt("only %d positive-margin pairs in %d draws", accepted, draws);
    return false;
  }
  detail = fmt("50 pairs: min (|O| - m) slack %.2e, bound = 1/m exact",
               min_gap);
  return true;
}

// --- 6: superposition over data, initial velocities, and forcing -----------

bool criterion_linearity(std::string& detail) {
  Rng rng(0x66u);
  auto grid = grid1d(16);
  auto fam = std::make_shared<const OperatorFamily>(OperatorFamily::scalar(1.3));
  const double horizon = 1.0;
  const std::size_t steps = 64;

  auto base = [&]() {
    NonlocalProblem p;
    p.grid = grid;
    p.family = fam;
    p.horizon = horizon;
    p.time_steps = steps;
    p.alpha = TimeMeasure(horizon, {{0.35, cplx(0.15)}}, {});
    p.beta = TimeMeasure(horizon, {{0.75, cplx(-0.1)}}, {});
    return p;
  };

  double err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    NonlocalProblem p1 = base(), p2 = base(), p12 = base();
    p1.phi = random_freq(grid, 1, rng, 2.5);
    p1.psi = random_freq(grid, 1, rng, 2.5);
    p2.phi = random_freq(grid, 1, rng, 2.5);
    p2.psi = random_freq(grid, 1, rng, 2.5);
    const Field prof1 = inverse(random_freq(grid, 1, rng, 2.0));
    const Field prof2 = inverse(random_freq(grid, 1, rng, 2.0));
    p1.forcing = envelope_forcing(prof1, steps, horizon, 1.1);
    p2.forcing = envelope_forcing(prof2, steps, horizon, 2.3);

    const cplx c1 = rng.normal_complex(), c2 = rng.normal_complex();
    p12.phi = p1.phi;
    p12.psi = p1.psi;
    p12.forcing = p1.forcing;
    for (std::size_t m = 0; m < grid->modes(); ++m) {
      p12.phi.at(m, 0) = c1 * p1.phi.at(m, 0) + c2 * p2.phi.at(m, 0);
      p12.psi.at(m, 0) = c1 * p1.psi.at(m, 0) + c2 * p2.psi.at(m, 0);
    }
    for (std::size_t k = 0; k <= steps; ++k)
      for (std::size_t m = 0; m < grid->modes(); ++m)
        p12.forcing[k].at(m, 0) =
            c1 * p1.forcing[k].at(m, 0) + c2 * p2.forcing[k].at(m, 0);

    const SolutionTimeline s1 = solve_linear(p1);
    const SolutionTimeline s2 = solve_linear(p2);
    const SolutionTimeline s12 = solve_linear(p12);
    for (std::size_t k = 0; k < s12.samples(); ++k)
      for (std::size_t m = 0; m < grid->modes(); ++m) {
        err = std::max(err, std::abs(s12.u[k].data[m] - c1 * s1.u[k].data[m] -
                                     c2 * s2.u[k].data[m]));
        err = std::max(err, std::abs(s12.ut[k].data[m] - c1 * s1.ut[k].data[m] -
                                     c2 * s2.ut[k].data[m]));
      }
  }
  detail = fmt("10 trials: max superposition defect %.2e", err);
  return err <= 1e-10;
}

// --- 7: contraction iteration on the cubic power law -----------------------

bool criterion_powerlaw(std::string& detail) {
  const auto t0 = clock_type::now();
  auto grid = grid1d(16);
  auto fam = std::make_shared<const OperatorFamily>(OperatorFamily::scalar(1.0));
  const double horizon = 0.2;
  const std::size_t steps = 256;

  auto build = [&](double lambda) {
    NonlocalProblem p;
    p.grid = grid;
    p.family = fam;
    p.horizon = horizon;
    p.time_steps = steps;
    p.alpha = TimeMeasure(horizon, {{0.6 * horizon, cplx(0.05)}}, {});
    p.beta = TimeMeasure(horizon, {{0.3 * horizon, cplx(0.05)}}, {});
    p.phi = forward(gaussian_phys(grid, 0.1, kPi, 0.7));
    p.psi = forward(gaussian_phys(grid, 0.05, 2.0 * kPi / 2.8, 0.9));
    if (lambda != 0.0) p.nonlinearity = Nonlinearity::power_law(lambda, 3.0);
    p.validate();
    return p;
  };

  const NonlocalProblem prob = build(0.01);
  const auto [sol, rep] = solve_nonlinear(prob);
  double max_rho = 0.0;
  for (double r : rep.rhos) max_rho = std::max(max_rho, r);

  const SolutionTimeline next = apply_G(prob, sol);
  const double fp_resid =
      timeline_distance(next, sol, *fam, 0.0, 2.0, 2.0);
  const ResidualReport res = residual_suite(sol, prob);

  bool ok = rep.status == "converged" && rep.iterations <= 25 &&
            max_rho < 0.9 && fp_resid <= 10.0 * rep.stopping_threshold &&
            res.pde_max <= 1e-6 && !rep.window_binds;

  // Leading-order response: distance to the lambda = 0 solve scales
  // linearly in lambda (slope 1 on a log-log fit).
  const SolutionTimeline lin = solve_linear(build(0.0));
  PicardOptions tight;
  tight.atol = 1e-13;
  tight.rtol = 1e-12;
  std::vector<double> lx, ly;
  for (double lambda : {1e-3, 1e-2, 1e-1}) {
    const auto [nsol, nrep] = solve_nonlinear(build(lambda), tight);
    ok = ok && nrep.status == "converged";
    const double d = timeline_distance(nsol, lin, *fam, 0.0, 2.0, 2.0);
    lx.push_back(std::log(lambda));
    ly.push_back(std::log(d));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(ly.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = num / den;
  ok = ok && slope >= 0.9 && slope <= 1.1;

  const double ms = ms_since(t0);
  detail = fmt("iters %d  max rho %.1e  fp %.1e  pde %.1e  slope %.4f",
               rep.iterations, max_rho, fp_resid, res.pde_max, slope);
  return ok && ms < 60000.0;
}

// --- 8: window-rule closed forms, exact arithmetic --------------------------

bool criterion_window(std::string& detail) {
  // M = 1, fbar = 1, C0 = 1: first bound = 1 / ((M+1)(1 + 2 C0 (M+1) fbar))
  // = 1/10 exactly. C1 = 0 removes the second bound from the minimum.
  const bool b1 = select_window(1.0, 1.0, 1.0, 0.0, 10.0) == 0.1;
  // M = 1, fbar = 1, C1 = 1: second bound = (1/2) / (1 + C1 (M+1)^2 fbar)
  // = 0.5/5 = 1/10 exactly. C0 = 0 pushes the first bound to 1/2.
  const bool b2 = select_window(1.0, 1.0, 0.0, 1.0, 10.0) == 0.1;
  // fbar = 0: window = min(T_user, 1/(M+1), 1/2), constants irrelevant.
  const bool z1 = select_window(1.0, 0.0, 7.0, 9.0, 10.0) == 0.5;
  const bool z2 = select_window(3.0, 0.0, 1.0, 1.0, 10.0) == 0.25;
  const bool z3 = select_window(1.0, 0.0, 1.0, 1.0, 0.3) == 0.3;
  detail = fmt("b1 %s  b2 %s  fbar=0 forms %s/%s/%s", b1 ? "==0.1" : "off",
               b2 ? "==0.1" : "off", z1 ? "==0.5" : "off",
               z2 ? "==0.25" : "off", z3 ? "==0.3" : "off");
  return b1 && b2 && z1 && z2 && z3;
}

// --- 9: continuation gluing equals the single-shot solve -------------------

bool criterion_gluing(std::string& detail) {
  auto grid = grid1d(32);
  auto fam = std::make_shared<const OperatorFamily>(OperatorFamily::scalar(1.0));
  const std::vector<TimeMeasure::Atom> a_atoms = {{0.3, cplx(0.2)}};
  const std::vector<TimeMeasure::Atom> b_atoms = {{0.6, cplx(-0.1)}};

  Field phi = zero_field(grid, 1, Space::Frequency);
  Field psi = zero_field(grid, 1, Space::Frequency);
  phi.at(1, 0) = 0.8;
  phi.at(grid->modes() - 2, 0) = cplx(0.0, 0.3);
  psi.at(2, 0) = 0.5;
  psi.at(grid->modes() - 1, 0) = cplx(0.2, -0.1);

  NonlocalProblem base;
  base.grid = grid;
  base.family = fam;
  base.horizon = 1.0;
  base.time_steps = 128;
  base.alpha = TimeMeasure(1.0, a_atoms, {});
  base.beta = TimeMeasure(1.0, b_atoms, {});
  base.phi = phi;
  base.psi = psi;
  base.validate();

  const SolutionTimeline sol = solve_linear(base);
  const SolutionTimeline glued = extend_solution(base, sol, 1.0);

  NonlocalProblem whole = base;
  whole.horizon = 2.0;
  whole.time_steps = 256;
  whole.alpha = TimeMeasure(2.0, a_atoms, {});
  whole.beta = TimeMeasure(2.0, b_atoms, {});
  whole.validate();
  const SolutionTimeline single = solve_linear(whole);

  if (glued.samples() != single.samples()) {
    detail = fmt("sample counts differ: %zu vs %zu", glued.samples(),
                 single.samples());
    return false;
  }
  double err = 0.0, terr = 0.0;
  for (std::size_t k = 0; k < glued.samples(); ++k) {
    terr = std::max(terr, std::abs(glued.times[k] - single.times[k]));
    for (std::size_t m = 0; m < grid->modes(); ++m) {
      err = std::max(err, std::abs(glued.u[k].data[m] - single.u[k].data[m]));
      err = std::max(err, std::abs(glued.ut[k].data[m] - single.ut[k].data[m]));
    }
  }
  detail = fmt("%zu samples: max field diff %.2e, time grids %.1e",
               glued.samples(), err, terr);
  return err <= 1e-8 && terr <= 1e-12;
}

// --- 10: monitored estimate ratios, finite and resolution-stable -----------

bool criterion_estimates(std::string& detail) {
  double worst_drift = 0.0;
  for (const char* file : {"planewave-linear.json", "section4.json"}) {
    Scenario sc = load_scenario(scenario_path(file));

    auto ratios = [](const Scenario& s) {
      const NonlocalProblem prob = s.build_problem();
      const SolutionTimeline sol = solve_linear(prob);
      const EstimateReport er = estimate_monitor(sol, prob, s.norms);
      return std::vector<EstimateEntry>{er.sup_laplacian_g, er.sup_plain_g,
                                        er.sup_sqrt_psi, er.sobolev_uniform,
                                        er.weighted_lq};
    };

    const std::vector<EstimateEntry> coarse = ratios(sc);
    Scenario fine_sc = sc;
    fine_sc.grid_points *= 2;
    fine_sc.time_steps *= 2;
    const std::vector<EstimateEntry> fine = ratios(fine_sc);

    int applicable = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (!coarse[i].applicable) continue;
      ++applicable;
      if (!std::isfinite(coarse[i].ratio) || !fine[i].applicable ||
          !std::isfinite(fine[i].ratio)) {
        detail = fmt("%s: entry %zu not finite/applicable at both levels",
                     file, i);
        return false;
      }
      const double drift =
          std::abs(fine[i].ratio - coarse[i].ratio) / std::abs(coarse[i].ratio);
      worst_drift = std::max(worst_drift, drift);
      if (drift >= 0.10) {
        detail = fmt("%s: entry %zu ratio drifts %.1f%% under doubling", file,
                     i, 100.0 * drift);
        return false;
      }
    }
    if (applicable == 0) {
      detail = fmt("%s: no applicable estimate entries", file);
      return false;
    }
  }
  detail = fmt("2 scenarios: worst ratio drift %.2f%% under K,P doubling",
               100.0 * worst_drift);
  return true;
}

// --- 11: byte-identical reports across repeats and thread counts -----------

bool criterion_determinism(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "nlwave-acceptance-det";
  fs::remove_all(root);

  auto run_once = [&](const char* sub, int threads) {
    RunOptions opts;
    opts.mode = RunMode::Verify;
    opts.out_dir = (root / sub).string();
    opts.threads = threads;
    opts.export_fields = false;
    opts.seed = 20260816ull;
    return run_scenario(scenario_path("manufactured-nonlocal.json"), opts);
  };
  const int rc1 = run_once("t1-a", 1);
  const int rc2 = run_once("t1-b", 1);
  const int rc3 = run_once("t4", 4);
  if (rc1 != 0 || rc2 != 0 || rc3 != 0) {
    detail = fmt("verify exit codes %d/%d/%d", rc1, rc2, rc3);
    return false;
  }

  auto canonical = [&](const char* sub) {
    std::ifstream in(root / sub / "report.json");
    const ojson j = ojson::parse(in);
    return strip_timings(j).dump();
  };
  const std::string s1 = canonical("t1-a");
  const std::string s2 = canonical("t1-b");
  const std::string s3 = canonical("t4");
  fs::remove_all(root);

  const bool ok = s1 == s2 && s1 == s3;
  detail = ok ? fmt("3 runs byte-identical after timing strip (%zu bytes)",
                    s1.size())
              : "reports differ across repeats or thread counts";
  return ok;
}

}  // namespace

int main() {
  Gate gate;
  run_criterion(gate, 1, "kernel-identities", criterion_identities);
  run_criterion(gate, 2, "plane-wave-exact", criterion_planewave);
  run_criterion(gate, 3, "manufactured-recovery", criterion_manufactured);
  run_criterion(gate, 4, "oracle-agreement", criterion_oracle);
  run_criterion(gate, 5, "margin-bound", criterion_margin);
  run_criterion(gate, 6, "linearity", criterion_linearity);
  run_criterion(gate, 7, "contraction-powerlaw", criterion_powerlaw);
  run_criterion(gate, 8, "window-closed-forms", criterion_window);
  run_criterion(gate, 9, "continuation-gluing", criterion_gluing);
  run_criterion(gate, 10, "estimate-stability", criterion_estimates);
  run_criterion(gate, 11, "determinism", criterion_determinism);

  std::printf("acceptance: %d/11 criteria passed\n", 11 - gate.failed);
  return gate.failed == 0 ? 0 : 1;
}
