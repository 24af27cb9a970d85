#include "nlwave/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "nlwave/errors.hpp"

namespace nlwave {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// One trajectory of the first-order system y = (v, w), y' = (w, g - A_xi v),
// stored at every fine node. Layout: node-major, 2N complex per node.
struct Trajectory {
  std::size_t nodes = 0;
  int n = 0;
  std::vector<cplx> y;

  const cplx* at(std::size_t node) const {
    return &y[node * std::size_t(2 * n)];
  }
};

// Linear interpolation of the coarse forcing series at an arbitrary time.
VectorXcd g_at(const std::vector<VectorXcd>& g_series, double dt_coarse,
               double t, int n) {
  if (g_series.empty()) return VectorXcd::Zero(n);
  const auto last = double(g_series.size() - 1);
  double pos = t / dt_coarse;
  pos = std::clamp(pos, 0.0, last);
  const auto i0 = std::size_t(std::min(last - 1.0, std::floor(pos)));
  const double f = pos - double(i0);
  return (1.0 - f) * g_series[i0] + f * g_series[i0 + 1];
}

Trajectory rk4_run(const MatrixXcd& a_xi, const VectorXcd& v0,
                   const VectorXcd& w0,
                   const std::vector<VectorXcd>& g_series, double dt_coarse,
                   double horizon, std::size_t fine_steps) {
  const int n = int(v0.size());
  Trajectory traj;
  traj.nodes = fine_steps + 1;
  traj.n = n;
  traj.y.resize(traj.nodes * std::size_t(2 * n));

  const double h = horizon / double(fine_steps);
  VectorXcd v = v0, w = w0;
  auto store = [&](std::size_t node) {
    cplx* dst = &traj.y[node * std::size_t(2 * n)];
    for (int c = 0; c < n; ++c) {
      dst[c] = v(c);
      dst[n + c] = w(c);
    }
  };
  store(0);

  VectorXcd k1v(n), k1w(n), k2v(n), k2w(n), k3v(n), k3w(n), k4v(n), k4w(n);
  for (std::size_t s = 0; s < fine_steps; ++s) {
    const double t = h * double(s);
    const VectorXcd g0 = g_at(g_series, dt_coarse, t, n);
    const VectorXcd gh = g_at(g_series, dt_coarse, t + 0.5 * h, n);
    const VectorXcd g1 = g_at(g_series, dt_coarse, t + h, n);

    k1v = w;
    k1w = g0 - a_xi * v;
    k2v = w + 0.5 * h * k1w;
    k2w = gh - a_xi * (v + 0.5 * h * k1v);
    k3v = w + 0.5 * h * k2w;
    k3w = gh - a_xi * (v + 0.5 * h * k2v);
    k4v = w + h * k3w;
    k4w = g1 - a_xi * (v + h * k3v);

    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    store(s + 1);
  }
  return traj;
}

// 4-point Lagrange interpolation of one stored component at time t.
cplx lagrange4(const Trajectory& traj, int component, double t, double h) {
  const auto n_nodes = traj.nodes;
  double pos = t / h;
  pos = std::clamp(pos, 0.0, double(n_nodes - 1));
  auto i0 = std::size_t(std::floor(pos));
  i0 = i0 > 0 ? i0 - 1 : 0;
  i0 = std::min(i0, n_nodes - 4);
  cplx acc = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    double weight = 1.0;
    const double tm = double(i0 + m);
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == m) continue;
      weight *= (pos - double(i0 + i)) / (tm - double(i0 + i));
    }
    acc += weight * traj.at(i0 + m)[component];
  }
  return acc;
}

}  // namespace

OracleResult oracle_solve_mode(const OperatorFamily& family, double xi2,
                               const VectorXcd& phi_hat,
                               const VectorXcd& psi_hat,
                               const TimeMeasure& alpha,
                               const TimeMeasure& beta,
                               const std::vector<VectorXcd>& g_series,
                               double horizon, std::size_t time_steps,
                               int fine_factor) {
  if (fine_factor < 4)
    throw ConfigError("oracle: fine factor must be >= 4");
  const int n = family.dim();
  const MatrixXcd a_xi =
      family.dense() + xi2 * MatrixXcd::Identity(n, n);
  const double dt_coarse = horizon / double(time_steps);
  const std::size_t fine_steps = std::size_t(fine_factor) * time_steps;
  const double h = horizon / double(fine_steps);

  // Fundamental trajectories (g = 0) and the particular one (zero data).
  std::vector<Trajectory> basis;
  basis.reserve(std::size_t(2 * n));
  const std::vector<VectorXcd> no_g;
  for (int j = 0; j < n; ++j)
    basis.push_back(rk4_run(a_xi, VectorXcd::Unit(n, j), VectorXcd::Zero(n),
                            no_g, dt_coarse, horizon, fine_steps));
  for (int j = 0; j < n; ++j)
    basis.push_back(rk4_run(a_xi, VectorXcd::Zero(n), VectorXcd::Unit(n, j),
                            no_g, dt_coarse, horizon, fine_steps));
  const Trajectory particular =
      rk4_run(a_xi, VectorXcd::Zero(n), VectorXcd::Zero(n), g_series,
              dt_coarse, horizon, fine_steps);

  // x = (v(0), w(0)) solves (I - Mint) x = (phi, psi) + r with
  // Mint = [int alpha v-rows of Phi; int beta w-rows of Phi],
  // r = (int alpha v-part of particular, int beta w-part of particular).
  MatrixXcd mint = MatrixXcd::Zero(2 * n, 2 * n);
  VectorXcd r(2 * n);
  for (int col = 0; col < 2 * n; ++col) {
    const Trajectory& traj = basis[std::size_t(col)];
    for (int row = 0; row < n; ++row) {
      mint(row, col) = alpha.integrate(
          [&](double s) { return lagrange4(traj, row, s, h); });
      mint(n + row, col) = beta.integrate(
          [&](double s) { return lagrange4(traj, n + row, s, h); });
    }
  }
  for (int row = 0; row < n; ++row) {
    r(row) = alpha.integrate(
        [&](double s) { return lagrange4(particular, row, s, h); });
    r(n + row) = beta.integrate(
        [&](double s) { return lagrange4(particular, n + row, s, h); });
  }

  MatrixXcd sys = MatrixXcd::Identity(2 * n, 2 * n) - mint;
  VectorXcd rhs(2 * n);
  rhs.head(n) = phi_hat;
  rhs.tail(n) = psi_hat;
  rhs += r;

  Eigen::PartialPivLU<MatrixXcd> lu(sys);
  const double dmod = std::abs(lu.determinant());
  if (dmod < 1e-12)
    throw SolveError("oracle: dense nonlocal system is singular (resonance)");
  const VectorXcd x = lu.solve(rhs);

  OracleResult res;
  res.u0 = x.head(n);
  res.u1 = x.tail(n);
  return res;
}

OracleComparison compare_with_oracle(const NonlocalProblem& prob,
                                     const SolutionTimeline& sol,
                                     int fine_factor, std::size_t max_modes) {
  prob.validate();
  const std::size_t modes = prob.grid->modes();
  const int n = prob.family->dim();

  std::vector<Field> freq_forcing;
  freq_forcing.reserve(prob.forcing.size());
  for (const Field& f : prob.forcing) freq_forcing.push_back(forward(f));

  std::vector<std::size_t> subset;
  if (modes <= max_modes) {
    subset.resize(modes);
    for (std::size_t m = 0; m < modes; ++m) subset[m] = m;
  } else {
    subset.reserve(max_modes);
    for (std::size_t i = 0; i < max_modes; ++i)
      subset.push_back(i * modes / max_modes);
  }

  OracleComparison cmp;
  cmp.modes_checked = subset.size();
  for (std::size_t m : subset) {
    VectorXcd phi_hat(n), psi_hat(n);
    for (int c = 0; c < n; ++c) {
      phi_hat(c) = prob.phi.data[m * std::size_t(n) + std::size_t(c)];
      psi_hat(c) = prob.psi.data[m * std::size_t(n) + std::size_t(c)];
    }
    std::vector<VectorXcd> g_series;
    if (!freq_forcing.empty()) {
      g_series.resize(freq_forcing.size(), VectorXcd(n));
      for (std::size_t k = 0; k < freq_forcing.size(); ++k)
        for (int c = 0; c < n; ++c)
          g_series[k](c) =
              freq_forcing[k].data[m * std::size_t(n) + std::size_t(c)];
    }
    const OracleResult o = oracle_solve_mode(
        *prob.family, prob.grid->xi_squared(m), phi_hat, psi_hat, prob.alpha,
        prob.beta, g_series, prob.horizon, prob.time_steps, fine_factor);
    for (int c = 0; c < n; ++c) {
      const cplx s0 = sol.u0_hat.data[m * std::size_t(n) + std::size_t(c)];
      const cplx s1 = sol.u1_hat.data[m * std::size_t(n) + std::size_t(c)];
      const double e0 = std::abs(s0 - o.u0(c)) / (1.0 + std::abs(o.u0(c)));
      const double e1 = std::abs(s1 - o.u1(c)) / (1.0 + std::abs(o.u1(c)));
      const double e = std::max(e0, e1);
      if (e > cmp.max_rel_error) {
        cmp.max_rel_error = e;
        cmp.worst_mode = m;
      }
    }
  }
  return cmp;
}

}  // namespace nlwave
