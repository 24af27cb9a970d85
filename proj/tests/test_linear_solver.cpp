#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "nlwave/errors.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/linear_solver.hpp"
#include "nlwave/operator_family.hpp"
#include "nlwave/problem.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

namespace {

NonlocalProblem base_problem(std::shared_ptr<const Grid> grid,
                             OperatorFamily fam, double horizon,
                             std::size_t steps) {
  NonlocalProblem prob;
  prob.grid = grid;
  prob.family = std::make_shared<OperatorFamily>(std::move(fam));
  prob.horizon = horizon;
  prob.time_steps = steps;
  prob.alpha = TimeMeasure::zero(horizon);
  prob.beta = TimeMeasure::zero(horizon);
  const int nc = prob.family->dim();
  prob.phi = zero_field(grid, nc, Space::Frequency);
  prob.psi = zero_field(grid, nc, Space::Frequency);
  return prob;
}

Field random_frequency_field(std::shared_ptr<const Grid> grid, int channels,
                             Rng& rng) {
  Field f = zero_field(grid, channels, Space::Frequency);
  for (cplx& v : f.data) v = rng.normal_complex();
  return f;
}

double max_sample_error(const SolutionTimeline& sol,
                        const NonlocalProblem& prob, double mu,
                        int wave_mode) {
  // Reference u*(x,t) = cos(mu t) e^{i wave_mode x} and its time derivative.
  double worst = 0.0;
  const auto* g = prob.grid.get();
  for (std::size_t k = 0; k < sol.samples(); ++k) {
    const double t = sol.times[k];
    for (std::size_t i = 0; i < g->modes(); ++i) {
      const cplx wave = std::exp(cplx(0.0, wave_mode * g->coords(i)[0]));
      worst = std::max(worst,
                       std::abs(sol.u[k].at(i, 0) - std::cos(mu * t) * wave));
      worst = std::max(
          worst, std::abs(sol.ut[k].at(i, 0) + mu * std::sin(mu * t) * wave));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("zero measures assemble the identity system") {
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  Rng rng(11);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(3.0)),
                                      1.0, 8);
  prob.phi = random_frequency_field(grid, 1, rng);
  prob.psi = random_frequency_field(grid, 1, rng);

  const ModeSystem sys = assemble_mode_system(prob, 2);
  CHECK(std::abs(sys.a11[0] - cplx(1.0)) < 1e-15);
  CHECK(std::abs(sys.a22[0] - cplx(1.0)) < 1e-15);
  CHECK(std::abs(sys.a12[0]) < 1e-15);
  CHECK(std::abs(sys.a21[0]) < 1e-15);
  CHECK(std::abs(sys.f1[0] - prob.phi.at(2, 0)) < 1e-15);
  CHECK(std::abs(sys.f2[0] - prob.psi.at(2, 0)) < 1e-15);
}

TEST_CASE("atom coefficients match the closed form") {
  // a = 0, mode m = 1 on a 2 pi box: mu^2 = 1. One alpha atom at T = pi with
  // weight 1 gives a11 = 1 - cos(pi) = 2 and a12 = -sin(pi) = 0.
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(0.0)),
                                      3.141592653589793, 8);
  prob.alpha = TimeMeasure(prob.horizon, {{3.141592653589793, cplx(1.0)}}, {});

  const ModeSystem sys = assemble_mode_system(prob, 1);
  CHECK(std::abs(sys.a11[0] - cplx(2.0)) < 1e-14);
  CHECK(std::abs(sys.a12[0]) < 1e-14);
  CHECK(std::abs(sys.a21[0]) < 1e-15);
  CHECK(std::abs(sys.a22[0] - cplx(1.0)) < 1e-15);
}

TEST_CASE("density coefficients integrate the kernels") {
  // alpha is the unit density on [0, pi]; at mu = 1 the exact integrals are
  // int cos = 0 and int sin = 2, so a11 = 1 and a12 = -2 up to trapezoid
  // error ((pi/4096)^2 scale).
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(0.0)),
                                      3.141592653589793, 8);
  prob.alpha = TimeMeasure(prob.horizon, {},
                           std::vector<cplx>(4097, cplx(1.0)));

  const ModeSystem sys = assemble_mode_system(prob, 1);
  CHECK(std::abs(sys.a11[0] - cplx(1.0)) < 1e-6);
  CHECK(std::abs(sys.a12[0] - cplx(-2.0)) < 1e-6);
}

TEST_CASE("cramer solve of a diagonal system") {
  const OperatorFamily fam = OperatorFamily::scalar(cplx(1.0));
  ModeSystem sys;
  sys.a11 = Eigen::VectorXcd::Constant(1, cplx(2.0));
  sys.a12 = Eigen::VectorXcd::Zero(1);
  sys.a21 = Eigen::VectorXcd::Zero(1);
  sys.a22 = Eigen::VectorXcd::Constant(1, cplx(1.0));
  sys.f1 = Eigen::VectorXcd::Constant(1, cplx(4.0));
  sys.f2 = Eigen::VectorXcd::Constant(1, cplx(5.0));

  const auto [u0, u1] = solve_mode(sys, fam, 0, 1.0, 0.0);
  CHECK(std::abs(u0[0] - cplx(2.0)) < 1e-15);
  CHECK(std::abs(u1[0] - cplx(5.0)) < 1e-15);
}

TEST_CASE("solved coefficients satisfy the nonlocal conditions") {
  // Non-normal 2x2 operator with both measures atomic: plug the solved
  // (u0, u1) back into the homogeneous integral conditions, which are exact
  // for atoms (no quadrature enters).
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  Eigen::MatrixXcd a(2, 2);
  a << cplx(2.0), cplx(1.0), cplx(0.5), cplx(1.5);
  Rng rng(29);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::matrix(a), 1.0, 16);
  prob.alpha = TimeMeasure(1.0, {{0.4, cplx(0.25)}}, {});
  prob.beta = TimeMeasure(1.0, {{0.7, cplx(-0.2)}}, {});
  prob.phi = random_frequency_field(grid, 2, rng);
  prob.psi = random_frequency_field(grid, 2, rng);
  const OperatorFamily& fam = *prob.family;

  const std::size_t mode = 3;
  const double xi2 = grid->xi_squared(mode);
  const double margin = invertibility_margin(prob.alpha, prob.beta);
  const ModeSystem sys = assemble_mode_system(prob, mode);
  const auto [u0, u1] = solve_mode(sys, fam, mode, margin, 0.0);

  Eigen::VectorXcd phi_hat(2), psi_hat(2);
  for (int c = 0; c < 2; ++c) {
    phi_hat[c] = prob.phi.at(mode, c);
    psi_hat[c] = prob.psi.at(mode, c);
  }

  const auto u_at = [&](double s) {
    return (cosine_apply(fam, xi2, s, u0) + sine_apply(fam, xi2, s, u1))
        .eval();
  };
  const auto ut_at = [&](double s) {
    const Eigen::VectorXcd su0 = sine_apply(fam, xi2, s, u0);
    return (cosine_apply(fam, xi2, s, u1) - power_apply(fam, xi2, 1.0, su0))
        .eval();
  };

  const Eigen::VectorXcd r1 = u0 - cplx(0.25) * u_at(0.4) - phi_hat;
  const Eigen::VectorXcd r2 = u1 - cplx(-0.2) * ut_at(0.7) - psi_hat;
  CHECK(r1.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r2.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mild evaluation reproduces the cosine mode") {
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(3.0)),
                                      1.0, 16);
  Eigen::VectorXcd u0 = Eigen::VectorXcd::Constant(1, cplx(1.0));
  Eigen::VectorXcd u1 = Eigen::VectorXcd::Zero(1);

  // mode m = 1: mu^2 = 3 + 1 = 4.
  const auto [at0_u, at0_ut] = evaluate_mild(prob, 1, u0, u1, 0.0);
  CHECK(std::abs(at0_u[0] - cplx(1.0)) < 1e-15);
  CHECK(std::abs(at0_ut[0]) < 1e-15);

  const double t = 0.65;
  const auto [u, ut] = evaluate_mild(prob, 1, u0, u1, t);
  CHECK(std::abs(u[0] - cplx(std::cos(2.0 * t))) < 1e-14);
  CHECK(std::abs(ut[0] - cplx(-2.0 * std::sin(2.0 * t))) < 1e-14);
}

TEST_CASE("mild evaluation integrates constant forcing") {
  // a = 1, mode 0 (mu = 1), u0 = u1 = 0, g constant in space and time:
  // u(t) = (1 - cos t) g_hat, u_t(t) = sin(t) g_hat, up to the trapezoid
  // error of the Duhamel quadrature (K = 512).
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(1.0)),
                                      1.0, 512);
  Field g_snap = zero_field(grid, 1, Space::Physical);
  for (cplx& v : g_snap.data) v = cplx(0.6);
  prob.forcing.assign(prob.time_steps + 1, g_snap);

  const cplx g_hat = 0.6 * std::sqrt(8.0);  // unitary transform of a constant
  Eigen::VectorXcd zerov = Eigen::VectorXcd::Zero(1);
  const auto [u, ut] = evaluate_mild(prob, 0, zerov, zerov, 1.0);
  CHECK(std::abs(u[0] - (1.0 - std::cos(1.0)) * g_hat) < 1e-5);
  CHECK(std::abs(ut[0] - std::sin(1.0) * g_hat) < 1e-5);
}

TEST_CASE("homogeneous plane wave is exact at grid times") {
  auto grid = std::make_shared<Grid>(1, 64, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(3.0)),
                                      1.0, 16);
  prob.phi.at(1, 0) = std::sqrt(64.0);  // e^{ix} in unitary scaling

  const SolutionTimeline sol = solve_linear(prob);
  CHECK(max_sample_error(sol, prob, 2.0, 1) < 1e-12);
  CHECK(sol.diagnostics.invertibility_margin == doctest::Approx(1.0));
  CHECK(sol.diagnostics.min_determinant == doctest::Approx(1.0));
}

TEST_CASE("an off-grid atom location is honored exactly") {
  // Manufactured from u* = cos(2t) e^{ix}: phi absorbs the alpha term
  // evaluated at t = 0.37, which is not a time-grid point (K = 128).
  auto grid = std::make_shared<Grid>(1, 64, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(3.0)),
                                      1.0, 128);
  prob.alpha = TimeMeasure(1.0, {{0.37, cplx(0.3)}}, {});
  prob.phi.at(1, 0) = (1.0 - 0.3 * std::cos(2.0 * 0.37)) * std::sqrt(64.0);

  const SolutionTimeline sol = solve_linear(prob);
  CHECK(max_sample_error(sol, prob, 2.0, 1) < 1e-10);
}

TEST_CASE("superposition holds across the full pipeline") {
  auto grid = std::make_shared<Grid>(1, 16, 6.283185307179586);
  Rng rng(41);
  Eigen::VectorXcd d(2);
  d << cplx(0.5), cplx(2.5);
  auto fresh = [&] {
    NonlocalProblem p = base_problem(grid, OperatorFamily::diagonal(d), 1.0,
                                     32);
    p.alpha = TimeMeasure(1.0, {{0.3, cplx(0.12)}}, {});
    p.beta = TimeMeasure(1.0, {{0.8, cplx(-0.07)}}, {});
    return p;
  };

  NonlocalProblem p1 = fresh();
  p1.phi = random_frequency_field(grid, 2, rng);
  p1.psi = random_frequency_field(grid, 2, rng);
  NonlocalProblem p2 = fresh();
  p2.phi = random_frequency_field(grid, 2, rng);
  p2.psi = random_frequency_field(grid, 2, rng);

  NonlocalProblem sum = fresh();
  sum.phi = p1.phi;
  sum.psi = p1.psi;
  const cplx c(2.0, 0.0);
  for (std::size_t i = 0; i < sum.phi.data.size(); ++i) {
    sum.phi.data[i] += c * p2.phi.data[i];
    sum.psi.data[i] += c * p2.psi.data[i];
  }

  const SolutionTimeline s1 = solve_linear(p1);
  const SolutionTimeline s2 = solve_linear(p2);
  const SolutionTimeline ss = solve_linear(sum);

  double worst = 0.0;
  for (std::size_t k = 0; k < ss.samples(); ++k)
    for (std::size_t i = 0; i < ss.u[k].data.size(); ++i) {
      worst = std::max(worst, std::abs(ss.u[k].data[i] - s1.u[k].data[i] -
                                       c * s2.u[k].data[i]));
      worst = std::max(worst, std::abs(ss.ut[k].data[i] - s1.ut[k].data[i] -
                                       c * s2.ut[k].data[i]));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("serial and parallel runs agree bitwise") {
  auto grid = std::make_shared<Grid>(1, 32, 6.283185307179586);
  Rng rng(53);
  Eigen::MatrixXcd a(2, 2);
  a << cplx(2.0), cplx(1.0), cplx(0.5), cplx(1.5);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::matrix(a), 1.0, 32);
  prob.alpha = TimeMeasure(1.0, {{0.4, cplx(0.25)}}, {});
  prob.beta = TimeMeasure(1.0, {{0.7, cplx(-0.2)}}, {});
  prob.phi = random_frequency_field(grid, 2, rng);
  prob.psi = random_frequency_field(grid, 2, rng);

  prob.exec = Exec::Serial;
  const SolutionTimeline serial = solve_linear(prob);
  prob.exec = Exec::Parallel;
  const SolutionTimeline parallel = solve_linear(prob);

  REQUIRE(serial.samples() == parallel.samples());
  for (std::size_t k = 0; k < serial.samples(); ++k)
    for (std::size_t i = 0; i < serial.u[k].data.size(); ++i) {
      CHECK(serial.u[k].data[i] == parallel.u[k].data[i]);
      CHECK(serial.ut[k].data[i] == parallel.ut[k].data[i]);
    }
}

TEST_CASE("a resonant mode raises a structured failure") {
  // a = 1, mode 0: mu = 1. Alpha atom at t = 1 with weight 1/cos(1) zeroes
  // the determinant of that mode's system.
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(1.0)),
                                      2.0, 8);
  prob.alpha = TimeMeasure(2.0, {{1.0, cplx(1.0 / std::cos(1.0))}}, {});
  prob.phi.at(1, 0) = cplx(1.0);

  bool thrown = false;
  try {
    solve_linear(prob);
  } catch (const SingularModeSystem& e) {
    thrown = true;
    CHECK(e.mode == 0);
    CHECK(e.channel == 0);
    CHECK(e.determinant_modulus < 1e-14);
  }
  CHECK(thrown);
}

TEST_CASE("invertibility report carries the margin and bound") {
  auto grid = std::make_shared<Grid>(1, 8, 6.283185307179586);
  NonlocalProblem prob = base_problem(grid, OperatorFamily::scalar(cplx(1.0)),
                                      1.0, 8);

  InvertibilityReport clean = check_O_invertibility(prob);
  CHECK(clean.margin == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(clean.bound == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(clean.min_O_modulus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clean.min_mode_determinant == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clean.max_discrepancy < 1e-14);

  prob.alpha = TimeMeasure(1.0, {{0.4, cplx(0.1)}}, {});
  prob.beta = TimeMeasure(1.0, {{0.7, cplx(0.2)}}, {});
  InvertibilityReport r = check_O_invertibility(prob);
  CHECK(r.margin == doctest::Approx(0.72).epsilon(1e-14));
  CHECK(r.bound == doctest::Approx(1.0 / 0.72).epsilon(1e-14));
  CHECK(r.min_O_modulus >= r.margin - 1e-12);
}

TEST_CASE("box-fit warning trips on edge-hugging data") {
  auto grid = std::make_shared<Grid>(1, 64, 6.283185307179586);
  const double L = grid->length();

  auto gaussian_problem = [&](double center) {
    NonlocalProblem prob = base_problem(grid,
                                        OperatorFamily::scalar(cplx(1.0)), 1.0,
                                        8);
    prob.check_box_fit = true;
    Field phys = zero_field(grid, 1, Space::Physical);
    for (std::size_t i = 0; i < grid->modes(); ++i) {
      const double x = grid->coords(i)[0];
      phys.data[i] = std::exp(-std::pow(x - center, 2) / 0.08);
    }
    prob.phi = forward(phys);
    return prob;
  };

  const SolutionTimeline centered = solve_linear(gaussian_problem(L / 2));
  CHECK_FALSE(centered.diagnostics.grid_leak_warning);

  const SolutionTimeline edged = solve_linear(gaussian_problem(0.1));
  CHECK(edged.diagnostics.grid_leak_warning);
  CHECK(edged.diagnostics.boundary_leak_ratio > 0.1);
}
