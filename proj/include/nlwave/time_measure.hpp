#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace nlwave {

using cplx = std::complex<double>;

// Signed measure on [0,T]: Dirac atoms (the multipoint case) plus an
// optional uniformly sampled density integrated by trapezoid. Immutable
// after construction; all operations are pure.
class TimeMeasure {
 public:
  struct Atom {
    double location;
    cplx weight;
  };

  // density: empty, or >= 2 uniform samples spanning [0,horizon].
  TimeMeasure(double horizon, std::vector<Atom> atoms, std::vector<cplx> density);

  static TimeMeasure zero(double horizon) { return {horizon, {}, {}}; }

  double horizon() const { return horizon_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<cplx>& density() const { return density_; }
  bool is_zero() const { return atoms_.empty() && density_.empty(); }

  // Integral of dm over [0,T]: atom weights exactly, density by trapezoid.
  cplx total() const;

  // Integral of |dm|: sum of |weights| plus trapezoid of |density|.
  double absolute_total() const;

  // Sum_k w_k K(lambda_k) + trapezoid(density * K). V is any value with
  // zero element, +, and scalar multiplication by cplx.
  template <class K, class V>
  V integrate(K&& kernel, V acc) const {
    for (const Atom& a : atoms_) acc += a.weight * kernel(a.location);
    if (!density_.empty()) {
      const std::size_t s = density_.size();
      const double dt = horizon_ / double(s - 1);
      for (std::size_t q = 0; q < s; ++q) {
        const double w = (q == 0 || q + 1 == s) ? 0.5 * dt : dt;
        acc += (w * density_[q]) * kernel(dt * double(q));
      }
    }
    return acc;
  }

  template <class K>
  cplx integrate(K&& kernel) const {
    return integrate(std::forward<K>(kernel), cplx(0.0));
  }

 private:
  double horizon_;
  std::vector<Atom> atoms_;
  std::vector<cplx> density_;
};

// m = |1 + total(alpha) * total(beta)| - (absolute_total(alpha) +
// absolute_total(beta)). Positive m certifies the nonlocal conditions'
// operator is invertible with norm bound 1/m. Uses the product of totals
// (the double-integral form of the displayed operator); see
// pointwise_product_integral for the single-integral diagnostic.
double invertibility_margin(const TimeMeasure& alpha, const TimeMeasure& beta);

// Diagnostic only: the single-integral pairing of the two densities,
// trapezoid of alpha(s)*beta(s) over the common horizon (densities resampled
// to the finer of the two grids). Atom pairs are not absolutely continuous
// and contribute nothing here. Not used in any solvability decision.
cplx pointwise_product_integral(const TimeMeasure& alpha, const TimeMeasure& beta);

}  // namespace nlwave
