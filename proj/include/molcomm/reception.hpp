#pragma once
// Statistical models of received molecule counts per port: the exact
// binomial-signal-plus-Poisson-noise law, its Poisson approximation, and
// matching samplers. All PMF arithmetic runs in log space.
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "molcomm/constellation.hpp"
#include "molcomm/numeric.hpp"
#include "molcomm/rng.hpp"

namespace molcomm {

using Count = std::int64_t;
using ReceivedVector = std::vector<Count>;

enum class ReceptionModel { Exact, PoissonApprox };

struct ReceptionParams {
  double lambda = 0.0;  ///< mean noise molecules per port per slot
  ReceptionModel model = ReceptionModel::Exact;

  void validate() const {
    if (!(lambda >= 0) || !std::isfinite(lambda))
      throw std::invalid_argument("ReceptionParams: lambda must be >= 0");
  }
};

/// Round a designed (real) transmit count to whole molecules, half to even.
inline Count integerize(double a) {
  if (!(a >= 0) || !std::isfinite(a))
    throw std::invalid_argument("integerize: count must be finite and >= 0");
  return static_cast<Count>(std::nearbyint(a));
}

/// log Poisson(mu) pmf at m; mu = 0 degenerates to a point mass at 0.
inline double log_pmf_poisson(Count m, double mu) {
  if (m < 0) return kNegInf;
  if (mu <= 0.0) return m == 0 ? 0.0 : kNegInf;
  return m * std::log(mu) - mu - std::lgamma(double(m) + 1.0);
}

inline double pmf_poisson(Count m, double mu) {
  return std::exp(log_pmf_poisson(m, mu));
}

/// log P(m) for the exact per-port law: Binomial(a, h) signal plus
/// Poisson(lambda) noise, summed over the split of m with log-sum-exp.
/// lambda = 0 with m > a yields exactly -inf (probability zero).
inline double log_pmf_exact(Count m, Count a, double h, double lambda) {
  if (a < 0) throw std::invalid_argument("log_pmf_exact: a < 0");
  if (!(h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("log_pmf_exact: h outside [0,1]");
  if (!(lambda >= 0))
    throw std::invalid_argument("log_pmf_exact: lambda < 0");
  if (m < 0) return kNegInf;

  if (a == 0 || h == 0.0) return log_pmf_poisson(m, lambda);
  if (lambda == 0.0) {
    // pure binomial
    if (m > a) return kNegInf;
    if (h == 1.0) return m == a ? 0.0 : kNegInf;
    return std::lgamma(double(a) + 1) - std::lgamma(double(m) + 1) -
           std::lgamma(double(a - m) + 1) + m * std::log(h) +
           (a - m) * std::log1p(-h);
  }
  if (h == 1.0) {
    // all signal molecules arrive; the remainder is noise
    return log_pmf_poisson(m - a, lambda);
  }

  const double log_h = std::log(h);
  const double log_1mh = std::log1p(-h);
  const double log_lam = std::log(lambda);
  const Count k_hi = std::min(a, m);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k_hi) + 1);
  // log C(a,k) built incrementally across k
  double log_binom = 0.0;
  for (Count k = 0; k <= k_hi; ++k) {
    if (k > 0)
      log_binom += std::log(double(a - k + 1)) - std::log(double(k));
    terms.push_back(log_binom + k * log_h + (a - k) * log_1mh - lambda +
                    (m - k) * log_lam - std::lgamma(double(m - k) + 1.0));
  }
  return log_sum_exp(terms);
}

inline double pmf_exact(Count m, Count a, double h, double lambda) {
  return std::exp(log_pmf_exact(m, a, h, lambda));
}

/// Upper truncation bound for enumerations over one port: mean plus twelve
/// standard deviations plus 50, leaving < 1e-20 of mass outside.
inline Count truncation_bound(double a, double h, double lambda,
                              ReceptionModel model) {
  const double mean = a * h + lambda;
  const double var = model == ReceptionModel::Exact
                         ? a * h * (1.0 - h) + lambda
                         : a * h + lambda;
  return static_cast<Count>(std::ceil(mean + 12.0 * std::sqrt(var) + 50.0));
}

/// log of the joint PMF of a received vector given transmitted symbol b.
/// Ports are independent; the model selects the exact law (with designed
/// counts integerized) or the Poisson approximation Poisson(a*h + lambda).
inline double log_joint_pmf(const ReceivedVector& m, int b,
                            const Constellation& cst, double h,
                            const ReceptionParams& params) {
  if (b < 0 || b >= cst.m)
    throw std::invalid_argument("log_joint_pmf: symbol index out of range");
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("log_joint_pmf: dimension mismatch");
  params.validate();
  double acc = 0.0;
  for (int i = 0; i < cst.k; ++i) {
    const double a = cst.symbols[b][i];
    const double lp =
        params.model == ReceptionModel::Exact
            ? log_pmf_exact(m[i], integerize(a), h, params.lambda)
            : log_pmf_poisson(m[i], a * h + params.lambda);
    if (lp == kNegInf) return kNegInf;
    acc += lp;
  }
  return acc;
}

inline double joint_pmf(const ReceivedVector& m, int b,
                        const Constellation& cst, double h,
                        const ReceptionParams& params) {
  return std::exp(log_joint_pmf(m, b, cst, h, params));
}

namespace detail {
inline Count sample_binomial(Count trials, double p, std::mt19937_64& rng) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<Count> dist(trials, p);
  return dist(rng);
}

inline Count sample_poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<Count> dist(mean);
  return dist(rng);
}
}  // namespace detail

/// Draw one received vector for transmitted symbol b. Ports are sampled in
/// axis order, signal before noise, so a fixed seed reproduces bit-identical
/// sequences.
inline ReceivedVector sample_received(int b, const Constellation& cst,
                                      double h, const ReceptionParams& params,
                                      std::mt19937_64& rng) {
  if (b < 0 || b >= cst.m)
    throw std::invalid_argument("sample_received: symbol index out of range");
  if (!(h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("sample_received: h outside [0,1]");
  params.validate();
  ReceivedVector m(cst.k);
  for (int i = 0; i < cst.k; ++i) {
    const double a = cst.symbols[b][i];
    if (params.model == ReceptionModel::Exact) {
      m[i] = detail::sample_binomial(integerize(a), h, rng) +
             detail::sample_poisson(params.lambda, rng);
    } else {
      m[i] = detail::sample_poisson(a * h + params.lambda, rng);
    }
  }
  return m;
}

}  // namespace molcomm
