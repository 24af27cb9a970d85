#include "nlwave/operator_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlwave/errors.hpp"

namespace nlwave {

cplx cosine_scalar(cplx mu2, double t) {
  return std::cos(t * std::sqrt(mu2));
}

cplx sine_scalar(cplx mu2, double t) {
  if (std::abs(mu2) < 1e-12) {
    const cplx z = mu2 * (t * t);
    return t * (1.0 - z / 6.0 + z * z / 120.0);
  }
  const cplx mu = std::sqrt(mu2);
  return std::sin(t * mu) / mu;
}

cplx power_scalar(cplx z, double gamma) {
  if (gamma == 0.0) return 1.0;
  if (z == cplx(0.0)) return 0.0;
  return std::exp(gamma * std::log(z));
}

namespace {

double condition_number(const Eigen::MatrixXcd& v) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

OperatorFamily OperatorFamily::scalar(cplx a) {
  OperatorFamily f;
  f.kind_ = FamilyKind::Scalar;
  f.dim_ = 1;
  f.eigenvalues_ = Eigen::VectorXcd::Constant(1, a);
  f.dense_ = Eigen::MatrixXcd::Constant(1, 1, a);
  return f;
}

OperatorFamily OperatorFamily::diagonal(Eigen::VectorXcd d) {
  if (d.size() < 1) throw ConfigError("diagonal family needs at least one entry");
  OperatorFamily f;
  f.kind_ = FamilyKind::Diagonal;
  f.dim_ = int(d.size());
  f.dense_ = d.asDiagonal();
  f.eigenvalues_ = std::move(d);
  return f;
}

OperatorFamily OperatorFamily::matrix(Eigen::MatrixXcd a, double cond_cap) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw ConfigError("matrix family must be square and nonempty");
  OperatorFamily f;
  f.kind_ = FamilyKind::Matrix;
  f.dim_ = int(a.rows());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success)
    throw ConfigError("eigendecomposition failed to converge");
  f.eigenvalues_ = es.eigenvalues();
  f.v_ = es.eigenvectors();
  f.eigvec_condition_ = condition_number(f.v_);
  if (!(f.eigvec_condition_ <= cond_cap))
    throw ConfigError(
        "matrix not diagonalizable within the condition cap: eigenvector "
        "condition number " +
        std::to_string(f.eigvec_condition_) + " exceeds " +
        std::to_string(cond_cap));
  f.vinv_ = f.v_.inverse();
  f.dense_ = std::move(a);
  return f;
}

void OperatorFamily::to_eigen(const cplx* v, cplx* w) const {
  if (v_.size() == 0) {
    for (int i = 0; i < dim_; ++i) w[i] = v[i];
    return;
  }
  Eigen::Map<const Eigen::VectorXcd> in(v, dim_);
  Eigen::Map<Eigen::VectorXcd> out(w, dim_);
  out = vinv_ * in;
}

void OperatorFamily::from_eigen(const cplx* w, cplx* v) const {
  if (v_.size() == 0) {
    for (int i = 0; i < dim_; ++i) v[i] = w[i];
    return;
  }
  Eigen::Map<const Eigen::VectorXcd> in(w, dim_);
  Eigen::Map<Eigen::VectorXcd> out(v, dim_);
  out = v_ * in;
}

void OperatorFamily::apply(const cplx* v, cplx* out) const {
  Eigen::Map<const Eigen::VectorXcd> in(v, dim_);
  Eigen::Map<Eigen::VectorXcd> res(out, dim_);
  res = dense_ * in;
}

void OperatorFamily::apply_power(double xi2, double gamma, const cplx* v,
                                 cplx* out) const {
  std::vector<cplx> w(dim_);
  to_eigen(v, w.data());
  for (int j = 0; j < dim_; ++j)
    w[j] *= power_scalar(eigenvalues_[j] + xi2, gamma);
  from_eigen(w.data(), out);
}

bool OperatorFamily::power_branch_ambiguous(double xi2) const {
  for (int j = 0; j < dim_; ++j) {
    const cplx z = eigenvalues_[j] + xi2;
    if (z.real() < 0.0 && std::abs(z.imag()) <= 1e-14 * std::abs(z.real()))
      return true;
  }
  return false;
}

namespace {

template <class Fn>
Eigen::VectorXcd channel_apply(const OperatorFamily& fam, double xi2,
                               const Eigen::VectorXcd& v, Fn&& fn) {
  const int n = fam.dim();
  std::vector<cplx> w(n);
  fam.to_eigen(v.data(), w.data());
  for (int j = 0; j < n; ++j) w[j] *= fn(fam.eigenvalues()[j] + xi2);
  Eigen::VectorXcd out(n);
  fam.from_eigen(w.data(), out.data());
  return out;
}

}  // namespace

Eigen::VectorXcd cosine_apply(const OperatorFamily& fam, double xi2, double t,
                              const Eigen::VectorXcd& v) {
  return channel_apply(fam, xi2, v,
                       [t](cplx mu2) { return cosine_scalar(mu2, t); });
}

Eigen::VectorXcd sine_apply(const OperatorFamily& fam, double xi2, double t,
                            const Eigen::VectorXcd& v) {
  return channel_apply(fam, xi2, v,
                       [t](cplx mu2) { return sine_scalar(mu2, t); });
}

Eigen::VectorXcd power_apply(const OperatorFamily& fam, double xi2, double gamma,
                             const Eigen::VectorXcd& v) {
  return channel_apply(fam, xi2, v,
                       [gamma](cplx z) { return power_scalar(z, gamma); });
}

double cosine_operator_norm(const OperatorFamily& fam, double xi2, double t) {
  const int n = fam.dim();
  Eigen::VectorXcd c(n);
  for (int j = 0; j < n; ++j)
    c[j] = cosine_scalar(fam.eigenvalues()[j] + xi2, t);
  if (fam.kind() == FamilyKind::Scalar || fam.kind() == FamilyKind::Diagonal)
    return c.cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd m =
      fam.eigenvectors() * c.asDiagonal() * fam.eigenvectors_inverse();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().maxCoeff();
}

OperatorFamily build_wentzell(const std::vector<double>& a_samples,
                              const std::vector<double>& b_samples,
                              double cond_cap) {
  const std::size_t nodes = a_samples.size();
  if (nodes < 5) throw ConfigError("wentzell grid needs M >= 4 (M+1 samples)");
  if (b_samples.size() != nodes)
    throw ConfigError("wentzell coefficient sample counts differ");
  for (double a : a_samples)
    if (!(a > 0.0)) throw ConfigError("wentzell coefficient a must be positive");
  const std::size_t m = nodes - 1;
  const double h = 1.0 / double(m);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(nodes, nodes);
  for (std::size_t i = 1; i < m; ++i) {
    const double a = a_samples[i] / (h * h);
    const double b = b_samples[i] / (2.0 * h);
    op(i, i - 1) = a - b;
    op(i, i) = -2.0 * a;
    op(i, i + 1) = a + b;
  }
  // Wentzell rows: one-sided second-order stencils of a u'' + b u'.
  {
    const double a = a_samples[0] / (h * h);
    const double b = b_samples[0] / (2.0 * h);
    op(0, 0) = 2.0 * a - 3.0 * b;
    op(0, 1) = -5.0 * a + 4.0 * b;
    op(0, 2) = 4.0 * a - b;
    op(0, 3) = -a;
  }
  {
    const double a = a_samples[m] / (h * h);
    const double b = b_samples[m] / (2.0 * h);
    op(m, m) = 2.0 * a + 3.0 * b;
    op(m, m - 1) = -5.0 * a - 4.0 * b;
    op(m, m - 2) = 4.0 * a + b;
    op(m, m - 3) = -a;
  }
  OperatorFamily fam = OperatorFamily::matrix(std::move(op), cond_cap);
  fam.kind_ = FamilyKind::Wentzell;
  return fam;
}

double check_wentzell_condition(const std::vector<double>& a_samples,
                                const std::vector<double>& b_samples) {
  const std::size_t nodes = a_samples.size();
  if (nodes < 2 || b_samples.size() != nodes)
    throw ConfigError("wentzell condition check needs matching sample grids");
  for (double a : a_samples)
    if (!(a > 0.0)) throw ConfigError("wentzell coefficient a must be positive");
  const double h = 1.0 / double(nodes - 1);
  // Cumulative trapezoid of b/a from 0, then shift so the integral is
  // measured from y = 1/2 (linear interpolation between nodes).
  std::vector<double> cum(nodes, 0.0);
  for (std::size_t i = 1; i < nodes; ++i)
    cum[i] = cum[i - 1] +
             0.5 * h * (b_samples[i - 1] / a_samples[i - 1] +
                        b_samples[i] / a_samples[i]);
  const double pos = 0.5 / h;
  const std::size_t i0 = std::min<std::size_t>(std::size_t(pos), nodes - 2);
  const double frac = pos - double(i0);
  const double at_half = (1.0 - frac) * cum[i0] + frac * cum[i0 + 1];
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i + 1 == nodes) ? 0.5 * h : h;
    acc += w * std::exp(-(cum[i] - at_half));
  }
  return acc;
}

}  // namespace nlwave
