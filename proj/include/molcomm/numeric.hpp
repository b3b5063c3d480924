#pragma once
// Shared numerical helpers: stable log-sum-exp and adaptive Gauss-Kronrod
// integration with a hard convergence check.
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

namespace molcomm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Quadrature or other numerical routine failed to reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// log(sum_i exp(x[i])); empty or all -inf input yields -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Convergence is
/// verified by agreement between two refinement depths: sharply peaked
/// integrands make the built-in error estimate pessimistic even when the
/// value is fully converged, so the check compares values, not estimates.
/// Disagreement beyond rel_tol raises NumericalError rather than returning
/// a bad value.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-6) {
  if (!(b > a)) return 0.0;
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  // Escalating refinement ladder. The internal tolerances stay loose: the
  // Gauss-Kronrod error estimator has a relative floor well above rel_tol
  // on peaked integrands, and asking it for more just forces full-depth
  // recursion while the value is long converged. Accuracy is certified by
  // agreement between consecutive refinement levels instead.
  struct Level {
    unsigned depth;
    double tol;
  };
  constexpr Level levels[] = {{6, 1e-3}, {9, 2.5e-4}, {12, 1e-5}, {15, 1e-7}};
  double l1 = 0.0;
  double prev = gk::integrate(f, a, b, levels[0].depth, levels[0].tol,
                              nullptr, &l1);
  for (std::size_t i = 1; i < std::size(levels); ++i) {
    const double cur = gk::integrate(f, a, b, levels[i].depth, levels[i].tol,
                                     nullptr, &l1);
    const double scale =
        std::max({std::abs(cur), l1, std::numeric_limits<double>::min()});
    if (std::abs(cur - prev) <= rel_tol * scale) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "quadrature did not converge to rel tol " << rel_tol << " on [" << a
     << ", " << b << "]";
  throw NumericalError(os.str());
}

}  // namespace molcomm
