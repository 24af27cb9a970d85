#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "nlwave/errors.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/linear_solver.hpp"
#include "nlwave/oracle.hpp"
#include "nlwave/operator_family.hpp"
#include "nlwave/problem.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

TEST_CASE("zero measures reduce the oracle to the data") {
  const OperatorFamily fam = OperatorFamily::scalar(cplx(2.0));
  Eigen::VectorXcd phi = Eigen::VectorXcd::Constant(1, cplx(0.7, -0.3));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(1, cplx(-1.2, 0.4));
  const TimeMeasure none = TimeMeasure::zero(1.0);

  const OracleResult r =
      oracle_solve_mode(fam, 1.0, phi, psi, none, none, {}, 1.0, 16, 8);
  CHECK(std::abs(r.u0[0] - phi[0]) < 1e-12);
  CHECK(std::abs(r.u1[0] - psi[0]) < 1e-12);
}

TEST_CASE("oracle matches the analytic solve of an atomic system") {
  // Scalar a = 3, xi^2 = 1 (mu = 2), one alpha atom (0.6, 0.3): the 2x2
  // system is known in closed form, so the oracle is checked against values
  // it cannot share with the solver.
  const OperatorFamily fam = OperatorFamily::scalar(cplx(3.0));
  const double loc = 0.6;
  const cplx w(0.3);
  const TimeMeasure alpha(1.0, {{loc, w}}, {});
  const TimeMeasure none = TimeMeasure::zero(1.0);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Constant(1, cplx(0.9, 0.2));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(1, cplx(-0.5, 1.1));

  const cplx a11 = 1.0 - w * std::cos(2.0 * loc);
  const cplx a12 = -w * std::sin(2.0 * loc) / 2.0;
  const cplx det = a11;  // a21 = 0, a22 = 1
  const cplx u0 = (phi[0] - a12 * psi[0]) / det;
  const cplx u1 = psi[0];

  const OracleResult r =
      oracle_solve_mode(fam, 1.0, phi, psi, alpha, none, {}, 1.0, 32, 16);
  CHECK(std::abs(r.u0[0] - u0) < 1e-8);
  CHECK(std::abs(r.u1[0] - u1) < 1e-8);
}

TEST_CASE("oracle integrates forcing independently") {
  // u0 = u1 = 0, g constant, beta atom at t0: the exact condition gives
  // u1 = psi + w * [sin(t0) g_hat + ...] with u0 coupled only through alpha;
  // here alpha = 0 so u0 = phi = 0 and
  //   u1 (1 - w cos(t0)) = w * int_0^{t0} cos(t0 - r) g dr = w sin(t0) g.
  // (mu = 1: a = 1, xi = 0.)
  const OperatorFamily fam = OperatorFamily::scalar(cplx(1.0));
  const double t0 = 0.6;
  const cplx w(0.25);
  const TimeMeasure beta(1.0, {{t0, w}}, {});
  const TimeMeasure none = TimeMeasure::zero(1.0);
  Eigen::VectorXcd zero1 = Eigen::VectorXcd::Zero(1);

  const std::size_t steps = 64;
  const cplx g_val(0.8, -0.1);
  std::vector<Eigen::VectorXcd> g_series(
      steps + 1, Eigen::VectorXcd::Constant(1, g_val));

  // Expected: u0 solves u0 = phi + 0 => 0... but u1 feeds back through the
  // mild formula only via beta. Closed form:
  const cplx rhs = w * std::sin(t0) * g_val;
  const cplx u1 = rhs / (1.0 - w * std::cos(t0));

  const OracleResult r = oracle_solve_mode(fam, 0.0, zero1, zero1, none, beta,
                                           g_series, 1.0, steps, 16);
  CHECK(std::abs(r.u0[0]) < 1e-8);
  CHECK(std::abs(r.u1[0] - u1) < 1e-7);
}

TEST_CASE("oracle and solver agree on a dense random instance") {
  auto grid = std::make_shared<Grid>(1, 16, 6.283185307179586);
  Rng rng(77);
  Eigen::MatrixXcd a(2, 2);
  a << cplx(1.8), cplx(0.6), cplx(0.3), cplx(1.1);

  NonlocalProblem prob;
  prob.grid = grid;
  prob.family = std::make_shared<OperatorFamily>(OperatorFamily::matrix(a));
  prob.horizon = 1.0;
  prob.time_steps = 64;
  prob.alpha = TimeMeasure(1.0, {{0.35, cplx(0.15)}},
                           std::vector<cplx>(9, cplx(0.05)));
  prob.beta = TimeMeasure(1.0, {{0.8, cplx(-0.1)}}, {});
  prob.phi = zero_field(grid, 2, Space::Frequency);
  prob.psi = zero_field(grid, 2, Space::Frequency);
  for (cplx& v : prob.phi.data) v = rng.normal_complex();
  for (cplx& v : prob.psi.data) v = rng.normal_complex();

  const SolutionTimeline sol = solve_linear(prob);
  const OracleComparison cmp = compare_with_oracle(prob, sol, 16);
  CHECK(cmp.modes_checked == grid->modes());
  CHECK(cmp.max_rel_error < 1e-6);
}

TEST_CASE("oracle rejects a fine factor under 4") {
  const OperatorFamily fam = OperatorFamily::scalar(cplx(1.0));
  Eigen::VectorXcd zero1 = Eigen::VectorXcd::Zero(1);
  const TimeMeasure none = TimeMeasure::zero(1.0);
  CHECK_THROWS_AS(
      oracle_solve_mode(fam, 0.0, zero1, zero1, none, none, {}, 1.0, 16, 2),
      ConfigError);
}
