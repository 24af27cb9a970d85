#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace nlwave {

using cplx = std::complex<double>;

/* Scalar mode functions, entire and even in mu = sqrt(mu2), so the branch
 * of the square root is immaterial:
 *   c(mu2, t) = cos(t mu)
 *   s(mu2, t) = sin(t mu)/mu,  with the series t(1 - z/6 + z^2/120),
 *               z = mu2 t^2, when |mu2| < 1e-12 (removable singularity;
 *               truncation << 1e-15 for t <= 10).
 */
cplx cosine_scalar(cplx mu2, double t);
cplx sine_scalar(cplx mu2, double t);
// Principal-branch power z^gamma (0^gamma = 0 for gamma > 0, 0^0 = 1).
cplx power_scalar(cplx z, double gamma);

enum class FamilyKind { Scalar, Diagonal, Matrix, Wentzell };

// Concrete realization of the operator A on E = C^N with a one-time
// eigendecomposition A = V diag(lambda) V^-1. The per-mode shift
// A_xi = A + |xi|^2 I shares the eigenvectors, so every mode reuses V.
// Immutable after construction; all evaluations are pure.
class OperatorFamily {
 public:
  static OperatorFamily scalar(cplx a);
  static OperatorFamily diagonal(Eigen::VectorXcd d);
  static OperatorFamily matrix(Eigen::MatrixXcd a, double cond_cap = 1e8);

  FamilyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  // Eigenvector condition number kappa(V); 1 for Scalar/Diagonal.
  double eigvec_condition() const { return eigvec_condition_; }
  // The operator as a dense matrix (used by the brute-force oracle and
  // pointwise application; for Scalar/Diagonal it is materialized).
  const Eigen::MatrixXcd& dense() const { return dense_; }
  // Eigenvector matrices; empty for Scalar/Diagonal (V = I implicitly).
  const Eigen::MatrixXcd& eigenvectors() const { return v_; }
  const Eigen::MatrixXcd& eigenvectors_inverse() const { return vinv_; }

  // Eigen-coordinate maps; w and v are length-dim arrays. For
  // Scalar/Diagonal these are the identity.
  void to_eigen(const cplx* v, cplx* w) const;
  void from_eigen(const cplx* w, cplx* v) const;

  // out = A v (dense product; independent of the eigendecomposition).
  void apply(const cplx* v, cplx* out) const;

  // out = (A + xi2 I)^gamma v via the eigendecomposition, principal branch.
  void apply_power(double xi2, double gamma, const cplx* v, cplx* out) const;

  // True if some shifted eigenvalue lies on the negative real axis, where
  // the principal power branch is ambiguous.
  bool power_branch_ambiguous(double xi2) const;

 private:
  OperatorFamily() = default;
  FamilyKind kind_ = FamilyKind::Scalar;
  int dim_ = 1;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd v_, vinv_;  // empty for Scalar/Diagonal
  Eigen::MatrixXcd dense_;
  double eigvec_condition_ = 1.0;

  friend OperatorFamily build_wentzell(const std::vector<double>&,
                                       const std::vector<double>&, double);
};

// f(A_xi) v for f = C(xi,t,A), S(xi,t,A), (A_xi)^gamma.
Eigen::VectorXcd cosine_apply(const OperatorFamily& fam, double xi2, double t,
                              const Eigen::VectorXcd& v);
Eigen::VectorXcd sine_apply(const OperatorFamily& fam, double xi2, double t,
                            const Eigen::VectorXcd& v);
Eigen::VectorXcd power_apply(const OperatorFamily& fam, double xi2, double gamma,
                             const Eigen::VectorXcd& v);

// Operator 2-norm of C(xi,t,A) = V diag(c_j(t)) V^-1 (growth diagnostic).
double cosine_operator_norm(const OperatorFamily& fam, double xi2, double t);

/* Wentzell-Robin operator A u = a u'' + b u' on (0,1), discretized on the
 * M+1 point grid y_i = i/M. Interior rows use central stencils; the
 * boundary rows are the one-sided second-order stencils of a u'' + b u',
 * so the generator itself enforces a(j)u'' + b(j)u' = 0 at y = 0, 1.
 * a_samples, b_samples: values at the grid nodes, a > 0, size M+1, M >= 4.
 */
OperatorFamily build_wentzell(const std::vector<double>& a_samples,
                              const std::vector<double>& b_samples,
                              double cond_cap = 1e8);

// Trapezoid value of the admissibility integral
// int_0^1 exp(-int_{1/2}^y b/a dt) dy on the sample grid. Finite by
// construction; reported so near-violations are visible.
double check_wentzell_condition(const std::vector<double>& a_samples,
                                const std::vector<double>& b_samples);

}  // namespace nlwave
