#include "nlwave/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nlwave/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlwave {

namespace {

// Everything one spatial mode needs, in A's eigenbasis: the shifted
// eigenvalues mu_j^2, kernel tables c_j(t_k), s_j(t_k) on the time grid,
// the forcing series g_j(t_k), and the running Duhamel tables
//   Is[j][k] = int_0^{t_k} s_j(t_k - r) g_j(r) dr   (trapezoid)
//   Ic[j][k] = int_0^{t_k} c_j(t_k - r) g_j(r) dr.
// Tables turn every grid-time Duhamel evaluation into a dot product with no
// transcendental calls; off-grid evaluations fall back to analytic kernels.
struct ModeWorkspace {
  std::size_t mode = 0;
  int n = 1;           // eigenchannels
  std::size_t nt = 0;  // K+1
  double dt = 0.0;
  double horizon = 0.0;
  std::vector<cplx> mu2;      // [j]
  std::vector<cplx> ct, st;   // [j*nt + k]
  std::vector<cplx> g;        // [j*nt + k]; empty when forcing is zero
  std::vector<cplx> is, ic;   // [j*nt + k]; empty when forcing is zero

  bool has_forcing() const { return !g.empty(); }

  const cplx* c_row(int j) const { return &ct[std::size_t(j) * nt]; }
  const cplx* s_row(int j) const { return &st[std::size_t(j) * nt]; }
  const cplx* g_row(int j) const { return &g[std::size_t(j) * nt]; }

  // Index of a grid time within rounding slack, or -1.
  std::ptrdiff_t grid_index(double t) const {
    const double pos = t / dt;
    const double k = std::round(pos);
    if (k < 0.0 || k > double(nt - 1)) return -1;
    if (std::abs(t - k * dt) <= 1e-12 * std::max(1.0, horizon))
      return std::ptrdiff_t(k);
    return -1;
  }

  // int_0^sigma kern(sigma - r) g_j(r) dr for arbitrary sigma in [0, T]:
  // grid times read the table; otherwise composite trapezoid over the full
  // cells below sigma plus a partial cell with g linearly interpolated.
  cplx duhamel_at(int j, double sigma, bool sine_kernel) const {
    if (!has_forcing() || sigma <= 0.0) return 0.0;
    const std::ptrdiff_t k = grid_index(sigma);
    const std::vector<cplx>& table = sine_kernel ? is : ic;
    if (k >= 0) return table[std::size_t(j) * nt + std::size_t(k)];

    const cplx m2 = mu2[std::size_t(j)];
    auto kern = [&](double t) {
      return sine_kernel ? sine_scalar(m2, t) : cosine_scalar(m2, t);
    };
    const cplx* gj = g_row(j);
    const auto q = std::size_t(std::min(double(nt - 2), std::floor(sigma / dt)));
    cplx acc = 0.0;
    if (q > 0) {
      acc += 0.5 * kern(sigma) * gj[0];
      for (std::size_t i = 1; i < q; ++i)
        acc += kern(sigma - dt * double(i)) * gj[i];
      acc += 0.5 * kern(sigma - dt * double(q)) * gj[q];
      acc *= dt;
    }
    const double tq = dt * double(q);
    const double h = sigma - tq;
    const double frac = h / dt;
    const cplx g_sigma = (1.0 - frac) * gj[q] + frac * gj[q + 1];
    acc += 0.5 * h * (kern(h) * gj[q] + kern(0.0) * g_sigma);
    return acc;
  }
};

ModeWorkspace build_workspace(const NonlocalProblem& prob, std::size_t mode,
                              const std::vector<Field>& freq_forcing) {
  const OperatorFamily& fam = *prob.family;
  ModeWorkspace w;
  w.mode = mode;
  w.n = fam.dim();
  w.nt = prob.time_steps + 1;
  w.dt = prob.dt();
  w.horizon = prob.horizon;

  const double xi2 = prob.grid->xi_squared(mode);
  w.mu2.resize(static_cast<std::size_t>(w.n));
  for (int j = 0; j < w.n; ++j)
    w.mu2[std::size_t(j)] = fam.eigenvalues()(j) + xi2;

  w.ct.resize(std::size_t(w.n) * w.nt);
  w.st.resize(std::size_t(w.n) * w.nt);
  for (int j = 0; j < w.n; ++j) {
    const cplx m2 = w.mu2[std::size_t(j)];
    cplx* c = &w.ct[std::size_t(j) * w.nt];
    cplx* s = &w.st[std::size_t(j) * w.nt];
    for (std::size_t k = 0; k < w.nt; ++k) {
      const double t = w.dt * double(k);
      c[k] = cosine_scalar(m2, t);
      s[k] = sine_scalar(m2, t);
    }
  }

  if (!freq_forcing.empty()) {
    // Gather this mode's E-vector series and rotate it to the eigenbasis.
    w.g.resize(std::size_t(w.n) * w.nt);
    std::vector<cplx> eig(static_cast<std::size_t>(w.n));
    for (std::size_t k = 0; k < w.nt; ++k) {
      const cplx* e = &freq_forcing[k].data[mode * std::size_t(w.n)];
      fam.to_eigen(e, eig.data());
      for (int j = 0; j < w.n; ++j)
        w.g[std::size_t(j) * w.nt + k] = eig[std::size_t(j)];
    }

    // Running trapezoid convolutions on the grid: O(K^2) multiply-adds.
    w.is.assign(std::size_t(w.n) * w.nt, cplx(0.0));
    w.ic.assign(std::size_t(w.n) * w.nt, cplx(0.0));
    for (int j = 0; j < w.n; ++j) {
      const cplx* c = w.c_row(j);
      const cplx* s = w.s_row(j);
      const cplx* gj = w.g_row(j);
      cplx* isj = &w.is[std::size_t(j) * w.nt];
      cplx* icj = &w.ic[std::size_t(j) * w.nt];
      for (std::size_t k = 1; k < w.nt; ++k) {
        cplx as = 0.5 * (s[k] * gj[0] + s[0] * gj[k]);
        cplx ac = 0.5 * (c[k] * gj[0] + c[0] * gj[k]);
        for (std::size_t i = 1; i < k; ++i) {
          as += s[k - i] * gj[i];
          ac += c[k - i] * gj[i];
        }
        isj[k] = w.dt * as;
        icj[k] = w.dt * ac;
      }
    }
  }
  return w;
}

struct AssembledMode {
  ModeSystem sys;
  // Per-channel diagnostic gathered during assembly:
  // O_j = 1 + total(alpha) total(beta) - int (alpha + beta) c_j.
  std::vector<cplx> O;
};

AssembledMode assemble(const NonlocalProblem& prob, const ModeWorkspace& w) {
  const OperatorFamily& fam = *prob.family;
  const int n = w.n;
  AssembledMode out;
  out.sys.a11.resize(n);
  out.sys.a12.resize(n);
  out.sys.a21.resize(n);
  out.sys.a22.resize(n);
  out.sys.f1.resize(n);
  out.sys.f2.resize(n);
  out.O.resize(static_cast<std::size_t>(n));

  // phi/psi at this mode, rotated to the eigenbasis.
  std::vector<cplx> phi_e(static_cast<std::size_t>(n)), psi_e(static_cast<std::size_t>(n));
  fam.to_eigen(&prob.phi.data[w.mode * std::size_t(n)], phi_e.data());
  fam.to_eigen(&prob.psi.data[w.mode * std::size_t(n)], psi_e.data());

  const cplx tot_ab = prob.alpha.total() * prob.beta.total();

  for (int j = 0; j < n; ++j) {
    const cplx m2 = w.mu2[std::size_t(j)];
    auto c_of = [&](double t) {
      const std::ptrdiff_t k = w.grid_index(t);
      return k >= 0 ? w.c_row(j)[k] : cosine_scalar(m2, t);
    };
    auto s_of = [&](double t) {
      const std::ptrdiff_t k = w.grid_index(t);
      return k >= 0 ? w.s_row(j)[k] : sine_scalar(m2, t);
    };

    const cplx int_ac = prob.alpha.integrate(c_of);
    const cplx int_as = prob.alpha.integrate(s_of);
    const cplx int_bc = prob.beta.integrate(c_of);
    const cplx int_bs = prob.beta.integrate(s_of);

    out.sys.a11(j) = 1.0 - int_ac;
    out.sys.a12(j) = -int_as;
    out.sys.a21(j) = m2 * int_bs;
    out.sys.a22(j) = 1.0 - int_bc;

    cplx f1 = phi_e[std::size_t(j)];
    cplx f2 = psi_e[std::size_t(j)];
    if (w.has_forcing()) {
      f1 += prob.alpha.integrate(
          [&](double s) { return w.duhamel_at(j, s, true); });
      f2 += prob.beta.integrate(
          [&](double s) { return w.duhamel_at(j, s, false); });
    }
    out.sys.f1(j) = f1;
    out.sys.f2(j) = f2;

    out.O[std::size_t(j)] = 1.0 + tot_ab - int_ac - int_bc;
  }
  return out;
}

struct ChannelSolve {
  Eigen::VectorXcd u0_e, u1_e;  // eigenbasis coordinates
  double min_abs_det = std::numeric_limits<double>::infinity();
  int bad_channel = -1;  // first channel under the guard, or -1
  double bad_det = 0.0;
};

ChannelSolve cramer_solve(const ModeSystem& sys, double margin,
                          double fraction) {
  const auto n = sys.a11.size();
  ChannelSolve r;
  r.u0_e.resize(n);
  r.u1_e.resize(n);
  const double guard =
      std::max(1e-14, margin > 0.0 ? fraction * margin : 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx det = sys.a11(j) * sys.a22(j) - sys.a12(j) * sys.a21(j);
    const double ad = std::abs(det);
    r.min_abs_det = std::min(r.min_abs_det, ad);
    if (ad <= guard) {
      if (r.bad_channel < 0) {
        r.bad_channel = int(j);
        r.bad_det = ad;
      }
      r.u0_e(j) = 0.0;
      r.u1_e(j) = 0.0;
      continue;
    }
    r.u0_e(j) = (sys.a22(j) * sys.f1(j) - sys.a12(j) * sys.f2(j)) / det;
    r.u1_e(j) = (sys.a11(j) * sys.f2(j) - sys.a21(j) * sys.f1(j)) / det;
  }
  return r;
}

Eigen::VectorXcd eig_to_E(const OperatorFamily& fam,
                          const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(v.size());
  fam.from_eigen(v.data(), out.data());
  return out;
}

// Result slots one mode writes during the parallel loop; reductions and
// error selection happen serially afterwards in index order.
struct ModeOutcome {
  bool singular = false;
  int channel = 0;
  double det = 0.0;
  double min_abs_det = std::numeric_limits<double>::infinity();
  double min_abs_O = std::numeric_limits<double>::infinity();
  double max_discrepancy = 0.0;
  double growth = 0.0;
};

void run_mode(const NonlocalProblem& prob,
              const std::vector<Field>& freq_forcing, std::size_t m,
              double margin, Field& u0_hat, Field& u1_hat,
              std::vector<Field>& freq_u, std::vector<Field>& freq_ut,
              ModeOutcome& out) {
  const OperatorFamily& fam = *prob.family;
  const int n = fam.dim();
  const ModeWorkspace w = build_workspace(prob, m, freq_forcing);
  const AssembledMode am = assemble(prob, w);
  const ChannelSolve cs =
      cramer_solve(am.sys, margin, prob.det_margin_fraction);

  out.min_abs_det = cs.min_abs_det;
  for (int j = 0; j < n; ++j) {
    out.min_abs_O = std::min(out.min_abs_O, std::abs(am.O[std::size_t(j)]));
    const cplx det =
        am.sys.a11(j) * am.sys.a22(j) - am.sys.a12(j) * am.sys.a21(j);
    out.max_discrepancy =
        std::max(out.max_discrepancy, std::abs(det - am.O[std::size_t(j)]));
    out.growth = std::max(
        out.growth, std::abs(std::imag(std::sqrt(w.mu2[std::size_t(j)]))));
  }
  if (cs.bad_channel >= 0) {
    out.singular = true;
    out.channel = cs.bad_channel;
    out.det = cs.bad_det;
    return;
  }

  // Retained coefficients in E-coordinates.
  const Eigen::VectorXcd u0 = eig_to_E(fam, cs.u0_e);
  const Eigen::VectorXcd u1 = eig_to_E(fam, cs.u1_e);
  for (int c = 0; c < n; ++c) {
    u0_hat.data[m * std::size_t(n) + std::size_t(c)] = u0(c);
    u1_hat.data[m * std::size_t(n) + std::size_t(c)] = u1(c);
  }

  // Mild solution at every grid time, straight from the tables.
  Eigen::VectorXcd ue(n), ute(n), uE(n), utE(n);
  for (std::size_t k = 0; k < w.nt; ++k) {
    for (int j = 0; j < n; ++j) {
      const cplx c = w.c_row(j)[k];
      const cplx s = w.s_row(j)[k];
      cplx du_s = 0.0, du_c = 0.0;
      if (w.has_forcing()) {
        du_s = w.is[std::size_t(j) * w.nt + k];
        du_c = w.ic[std::size_t(j) * w.nt + k];
      }
      ue(j) = c * cs.u0_e(j) + s * cs.u1_e(j) + du_s;
      ute(j) = -w.mu2[std::size_t(j)] * s * cs.u0_e(j) + c * cs.u1_e(j) + du_c;
    }
    fam.from_eigen(ue.data(), uE.data());
    fam.from_eigen(ute.data(), utE.data());
    for (int c = 0; c < n; ++c) {
      freq_u[k].data[m * std::size_t(n) + std::size_t(c)] = uE(c);
      freq_ut[k].data[m * std::size_t(n) + std::size_t(c)] = utE(c);
    }
  }
}

std::vector<Field> forcing_to_frequency(const NonlocalProblem& prob) {
  std::vector<Field> freq;
  freq.reserve(prob.forcing.size());
  for (const Field& f : prob.forcing) freq.push_back(forward(f));
  return freq;
}

}  // namespace

ModeSystem assemble_mode_system(const NonlocalProblem& prob,
                                std::size_t mode) {
  prob.validate();
  const std::vector<Field> freq = forcing_to_frequency(prob);
  const ModeWorkspace w = build_workspace(prob, mode, freq);
  return assemble(prob, w).sys;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> solve_mode(
    const ModeSystem& sys, const OperatorFamily& family, std::size_t mode,
    double margin, double fraction) {
  const ChannelSolve cs = cramer_solve(sys, margin, fraction);
  if (cs.bad_channel >= 0) {
    std::ostringstream msg;
    msg << "resonant nonlocal conditions: mode " << mode << " channel "
        << cs.bad_channel << " determinant " << cs.bad_det;
    throw SingularModeSystem(mode, cs.bad_channel, cs.bad_det, msg.str());
  }
  return {eig_to_E(family, cs.u0_e), eig_to_E(family, cs.u1_e)};
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> evaluate_mild(
    const NonlocalProblem& prob, std::size_t mode, const Eigen::VectorXcd& u0,
    const Eigen::VectorXcd& u1, double t) {
  prob.validate();
  const OperatorFamily& fam = *prob.family;
  const int n = fam.dim();
  const std::vector<Field> freq = forcing_to_frequency(prob);
  const ModeWorkspace w = build_workspace(prob, mode, freq);

  Eigen::VectorXcd u0e(n), u1e(n);
  fam.to_eigen(u0.data(), u0e.data());
  fam.to_eigen(u1.data(), u1e.data());

  Eigen::VectorXcd ue(n), ute(n);
  for (int j = 0; j < n; ++j) {
    const cplx m2 = w.mu2[std::size_t(j)];
    const std::ptrdiff_t k = w.grid_index(t);
    const cplx c = k >= 0 ? w.c_row(j)[k] : cosine_scalar(m2, t);
    const cplx s = k >= 0 ? w.s_row(j)[k] : sine_scalar(m2, t);
    const cplx du_s = w.duhamel_at(j, t, true);
    const cplx du_c = w.duhamel_at(j, t, false);
    ue(j) = c * u0e(j) + s * u1e(j) + du_s;
    ute(j) = -m2 * s * u0e(j) + c * u1e(j) + du_c;
  }
  return {eig_to_E(fam, ue), eig_to_E(fam, ute)};
}

std::pair<Field, Field> evaluate_at_time(const NonlocalProblem& prob,
                                         const SolutionTimeline& sol,
                                         double t) {
  prob.validate();
  const OperatorFamily& fam = *prob.family;
  const int n = fam.dim();
  const std::vector<Field> freq = forcing_to_frequency(prob);
  Field u = zero_field(prob.grid, n, Space::Frequency);
  Field ut = zero_field(prob.grid, n, Space::Frequency);

  Eigen::VectorXcd u0e(n), u1e(n), ue(n), ute(n), uE(n), utE(n);
  for (std::size_t m = 0; m < prob.grid->modes(); ++m) {
    const ModeWorkspace w = build_workspace(prob, m, freq);
    fam.to_eigen(&sol.u0_hat.data[m * std::size_t(n)], u0e.data());
    fam.to_eigen(&sol.u1_hat.data[m * std::size_t(n)], u1e.data());
    for (int j = 0; j < n; ++j) {
      const cplx m2 = w.mu2[std::size_t(j)];
      const std::ptrdiff_t k = w.grid_index(t);
      const cplx c = k >= 0 ? w.c_row(j)[k] : cosine_scalar(m2, t);
      const cplx s = k >= 0 ? w.s_row(j)[k] : sine_scalar(m2, t);
      ue(j) = c * u0e(j) + s * u1e(j) + w.duhamel_at(j, t, true);
      ute(j) =
          -m2 * s * u0e(j) + c * u1e(j) + w.duhamel_at(j, t, false);
    }
    fam.from_eigen(ue.data(), uE.data());
    fam.from_eigen(ute.data(), utE.data());
    for (int c = 0; c < n; ++c) {
      u.data[m * std::size_t(n) + std::size_t(c)] = uE(c);
      ut.data[m * std::size_t(n) + std::size_t(c)] = utE(c);
    }
  }
  return {std::move(u), std::move(ut)};
}

SolutionTimeline solve_linear(const NonlocalProblem& prob) {
  prob.validate();
  const Grid& grid = *prob.grid;
  const int n = prob.family->dim();
  const std::size_t modes = grid.modes();
  const std::size_t nt = prob.time_steps + 1;

  const double margin = invertibility_margin(prob.alpha, prob.beta);
  const std::vector<Field> freq_forcing = forcing_to_frequency(prob);

  SolutionTimeline sol;
  sol.times = prob.grid_times();
  sol.u0_hat = zero_field(prob.grid, n, Space::Frequency);
  sol.u1_hat = zero_field(prob.grid, n, Space::Frequency);
  std::vector<Field> freq_u(nt, zero_field(prob.grid, n, Space::Frequency));
  std::vector<Field> freq_ut(nt, zero_field(prob.grid, n, Space::Frequency));

  std::vector<ModeOutcome> outcomes(modes);

  const bool parallel = (prob.exec == Exec::Parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (std::ptrdiff_t m = 0; m < std::ptrdiff_t(modes); ++m) {
    run_mode(prob, freq_forcing, std::size_t(m), margin, sol.u0_hat,
             sol.u1_hat, freq_u, freq_ut, outcomes[std::size_t(m)]);
  }
#ifndef _OPENMP
  (void)parallel;
#endif

  // Serial, index-ordered error selection and reductions: identical output
  // for any thread count.
  for (std::size_t m = 0; m < modes; ++m) {
    if (outcomes[m].singular) {
      std::ostringstream msg;
      msg << "resonant nonlocal conditions: mode " << m << " channel "
          << outcomes[m].channel << " determinant " << outcomes[m].det;
      throw SingularModeSystem(m, outcomes[m].channel, outcomes[m].det,
                               msg.str());
    }
  }

  LinearDiagnostics& d = sol.diagnostics;
  d.invertibility_margin = margin;
  d.invertibility_bound =
      margin > 0.0 ? 1.0 / margin : std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < modes; ++m) {
    d.min_determinant = std::min(d.min_determinant, outcomes[m].min_abs_det);
    d.min_O_modulus = std::min(d.min_O_modulus, outcomes[m].min_abs_O);
    d.max_determinant_O_discrepancy =
        std::max(d.max_determinant_O_discrepancy, outcomes[m].max_discrepancy);
    d.max_mode_growth_rate = std::max(d.max_mode_growth_rate, outcomes[m].growth);
  }
  d.pointwise_product_integral =
      std::abs(pointwise_product_integral(prob.alpha, prob.beta));

  sol.u.reserve(nt);
  sol.ut.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    sol.u.push_back(inverse(freq_u[k]));
    sol.ut.push_back(inverse(freq_ut[k]));
  }

  if (prob.check_box_fit) {
    const Field phi_phys = inverse(prob.phi);
    const Field psi_phys = inverse(prob.psi);
    d.boundary_leak_ratio = std::max(boundary_leak_ratio(phi_phys),
                                     boundary_leak_ratio(psi_phys));
    d.grid_leak_warning = d.boundary_leak_ratio > 1e-3;
  }
  return sol;
}

InvertibilityReport check_O_invertibility(const NonlocalProblem& prob) {
  prob.validate();
  const double margin = invertibility_margin(prob.alpha, prob.beta);
  InvertibilityReport rep;
  rep.margin = margin;
  rep.bound =
      margin > 0.0 ? 1.0 / margin : std::numeric_limits<double>::infinity();
  rep.min_mode_determinant = std::numeric_limits<double>::infinity();
  rep.min_O_modulus = std::numeric_limits<double>::infinity();

  const cplx tot_ab = prob.alpha.total() * prob.beta.total();
  const std::vector<Field> no_forcing;  // O and det ignore f1/f2
  for (std::size_t m = 0; m < prob.grid->modes(); ++m) {
    const ModeWorkspace w = build_workspace(prob, m, no_forcing);
    for (int j = 0; j < w.n; ++j) {
      const cplx m2 = w.mu2[std::size_t(j)];
      auto c_of = [&](double t) { return cosine_scalar(m2, t); };
      auto s_of = [&](double t) { return sine_scalar(m2, t); };
      const cplx int_ac = prob.alpha.integrate(c_of);
      const cplx int_as = prob.alpha.integrate(s_of);
      const cplx int_bc = prob.beta.integrate(c_of);
      const cplx int_bs = prob.beta.integrate(s_of);
      const cplx det = (1.0 - int_ac) * (1.0 - int_bc) -
                       (-int_as) * (m2 * int_bs);
      const cplx O = 1.0 + tot_ab - int_ac - int_bc;
      rep.min_mode_determinant =
          std::min(rep.min_mode_determinant, std::abs(det));
      rep.min_O_modulus = std::min(rep.min_O_modulus, std::abs(O));
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(det - O));
    }
  }
  return rep;
}

}  // namespace nlwave
