#pragma once
// Decoding rules: exact ML over the binomial-plus-Poisson law, the Poisson
// optimal-weighted-combining rule, channel-free comparators for suitably
// symmetric ratio constellations, scalar thresholds, and the partial-channel-
// knowledge decoders (mean gain, full statistics, expected-log). Also the
// decision-region rasterizer used to reproduce region plots.
//
// Ties in every decoder resolve by the constellation's tie rank (default:
// lowest symbol index). Zero-probability symbols are excluded symbolically;
// no decoder does arithmetic on infinities.
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "molcomm/channel.hpp"
#include "molcomm/constellation.hpp"
#include "molcomm/reception.hpp"

namespace molcomm {

/// Every candidate symbol has probability zero for the observed vector.
struct ImpossibleObservation : std::runtime_error {
  ImpossibleObservation()
      : std::runtime_error("impossible observation: all symbols have "
                           "likelihood zero") {}
};

namespace detail {

/// Argmax with exact-equality ties resolved by constellation tie rank.
class BestSymbol {
 public:
  explicit BestSymbol(const Constellation& cst) : cst_(cst) {}

  void offer(int b, double score) {
    if (!has_) {
      has_ = true;
      score_ = score;
      b_ = b;
      return;
    }
    if (score > score_) {
      score_ = score;
      b_ = b;
    } else if (score == score_ && cst_.rank_of(b) < cst_.rank_of(b_)) {
      b_ = b;
    }
  }

  int get() const {
    if (!has_) throw ImpossibleObservation{};
    return b_;
  }

 private:
  const Constellation& cst_;
  bool has_ = false;
  double score_ = 0.0;
  int b_ = -1;
};

}  // namespace detail

namespace detail {

/// Tournament over pairwise log-likelihood differences, in tie-rank order.
/// Pairwise differencing is what makes symbolic ties exact in floating
/// point: axes where two symbols share a count contribute an exact zero,
/// and swapped axes contribute exactly negating terms. A plain per-symbol
/// score would pick up association rounding and break, for example, the
/// comparator ties of swap-symmetric designs.
///
/// `diff(b, b_prime)` returns the log-likelihood advantage of b over
/// b_prime; `possible(b)` excludes zero-probability symbols.
template <typename PossibleFn, typename DiffFn>
int pairwise_tournament(const Constellation& cst, PossibleFn&& possible,
                        DiffFn&& diff) {
  int cand = -1;
  for (int rank = 0; rank < cst.m; ++rank) {
    int s = -1;
    for (int b = 0; b < cst.m; ++b)
      if (cst.rank_of(b) == rank) {
        s = b;
        break;
      }
    if (!possible(s)) continue;
    if (cand < 0) {
      cand = s;
      continue;
    }
    if (!(diff(cand, s) >= 0.0)) cand = s;  // s strictly better
  }
  if (cand < 0) throw ImpossibleObservation{};
  return cand;
}

}  // namespace detail

/// Poisson-approximation ML decoder (optimal weighted combining): symbol b
/// beats b' when (c_b' - c_b) h + sum_i m_i log(mu_ib / mu_ib') >= 0 with
/// mu_ib = a_ib h + lambda. Ports whose mean is zero force likelihood zero
/// whenever their count is positive; such symbols are excluded before the
/// comparison, never folded into infinite arithmetic.
inline int decode_ml_poisson(const ReceivedVector& m, const Constellation& cst,
                             double h, double lambda) {
  if (!(h > 0.0 && h <= 1.0))
    throw std::invalid_argument("decode_ml_poisson: h must lie in (0,1]");
  if (!(lambda >= 0))
    throw std::invalid_argument("decode_ml_poisson: lambda < 0");
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("decode_ml_poisson: dimension mismatch");
  auto possible = [&](int b) {
    for (int i = 0; i < cst.k; ++i)
      if (m[i] > 0 && cst.symbols[b][i] * h + lambda <= 0.0) return false;
    return true;
  };
  auto diff = [&](int b, int bp) {
    double count_gap = 0.0;  // sum_i (a_ib' - a_ib), exact 0 on shared axes
    double log_part = 0.0;
    for (int i = 0; i < cst.k; ++i) {
      const double a = cst.symbols[b][i];
      const double ap = cst.symbols[bp][i];
      count_gap += ap - a;
      if (m[i] == 0 || a == ap) continue;
      log_part += double(m[i]) *
                  (std::log(a * h + lambda) - std::log(ap * h + lambda));
    }
    return count_gap * h + log_part;
  };
  return detail::pairwise_tournament(cst, possible, diff);
}

/// ML decoder under the exact binomial-plus-Poisson reception law; designed
/// counts are integerized before evaluating the per-port PMFs. Pairwise
/// differencing keeps swap-symmetric ties exact, as in decode_ml_poisson.
inline int decode_ml_exact(const ReceivedVector& m, const Constellation& cst,
                           double h, double lambda) {
  if (!(h >= 0.0 && h <= 1.0))
    throw std::invalid_argument("decode_ml_exact: h outside [0,1]");
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("decode_ml_exact: dimension mismatch");
  auto port_ll = [&](int b, int i) {
    return log_pmf_exact(m[i], integerize(cst.symbols[b][i]), h, lambda);
  };
  auto possible = [&](int b) {
    for (int i = 0; i < cst.k; ++i)
      if (port_ll(b, i) == kNegInf) return false;
    return true;
  };
  auto diff = [&](int b, int bp) {
    double acc = 0.0;
    for (int i = 0; i < cst.k; ++i) {
      if (cst.symbols[b][i] == cst.symbols[bp][i]) continue;
      acc += port_ll(b, i) - port_ll(bp, i);
    }
    return acc;
  };
  return detail::pairwise_tournament(cst, possible, diff);
}

/// Channel-free comparator for constellations passing check_channel_free.
/// The pairwise ML rule collapses to a sign-weighted count comparison that
/// involves no channel quantity at all; construction validates the design
/// rule once so per-call decoding is cheap.
class ChannelFreeDecoder {
 public:
  explicit ChannelFreeDecoder(const Constellation& cst) : cst_(cst) {
    const auto witness = check_channel_free(cst_);
    if (!witness.ok)
      throw std::invalid_argument("ChannelFreeDecoder: constellation is not "
                                  "channel-free: " +
                                  witness.describe());
    std::vector<std::vector<double>> r(cst_.m);
    for (int b = 0; b < cst_.m; ++b) r[b] = cst_.ratios(b);
    signs_.assign(cst_.m, std::vector<std::vector<int>>(
                              cst_.m, std::vector<int>(cst_.k, 0)));
    const double tol = 1e-9;
    for (int b = 0; b < cst_.m; ++b)
      for (int bp = 0; bp < cst_.m; ++bp)
        for (int i = 0; i < cst_.k; ++i) {
          const double d = r[b][i] - r[bp][i];
          const double scale = std::max(1.0, std::max(r[b][i], r[bp][i]));
          signs_[b][bp][i] = std::abs(d) <= tol * scale ? 0 : (d > 0 ? 1 : -1);
        }
    order_.resize(cst_.m);
    for (int b = 0; b < cst_.m; ++b) order_[b] = b;
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      return cst_.rank_of(a) < cst_.rank_of(b);
    });
  }

  int decode(const ReceivedVector& m) const {
    if (static_cast<int>(m.size()) != cst_.k)
      throw std::invalid_argument("ChannelFreeDecoder: dimension mismatch");
    int cand = order_[0];
    for (std::size_t j = 1; j < order_.size(); ++j) {
      const int s = order_[j];
      if (!beats(cand, s, m)) cand = s;
    }
    return cand;
  }

  int operator()(const ReceivedVector& m) const { return decode(m); }

 private:
  //  b at least ties b' iff sum_i m_i * sgn(r_ib - r_ib') >= 0
  bool beats(int b, int bp, const ReceivedVector& m) const {
    Count acc = 0;
    for (int i = 0; i < cst_.k; ++i) acc += m[i] * signs_[b][bp][i];
    return acc >= 0;
  }

  Constellation cst_;
  std::vector<std::vector<std::vector<int>>> signs_;
  std::vector<int> order_;
};

inline int decode_channel_free(const ReceivedVector& m,
                               const Constellation& cst) {
  return ChannelFreeDecoder(cst).decode(m);
}

/// Noise-free MAxRSK rule: argmax_b sum_i m_i log r_ib. Valid for any
/// equal-sum ratio constellation when lambda = 0; the channel gain cancels
/// regardless of the ratio values.
inline int decode_maxrsk_noise_free(const ReceivedVector& m,
                                    const Constellation& cst) {
  cst.validate();
  if (!cst.equal_sums())
    throw std::invalid_argument(
        "decode_maxrsk_noise_free: symbols must share one molecular budget");
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("decode_maxrsk_noise_free: dimension mismatch");
  detail::BestSymbol best(cst);
  for (int b = 0; b < cst.m; ++b) {
    const auto r = cst.ratios(b);
    double score = 0.0;
    bool possible = true;
    for (int i = 0; i < cst.k; ++i) {
      if (r[i] <= 0.0) {
        if (m[i] > 0) {
          possible = false;
          break;
        }
        continue;
      }
      score += double(m[i]) * std::log(r[i]);
    }
    if (possible) best.offer(b, score);
  }
  return best.get();
}

/// Ratio threshold for binary RSK under Poisson reception: decode bit 1 iff
/// m1/m2 >= eta. Symmetric designs (rho0 + rho1 = 1) cancel algebraically,
/// so they return 1 exactly.
inline double ratio_threshold(double rho0, double rho1, double c, double h,
                              double lambda) {
  if (!(rho1 > rho0))
    throw std::invalid_argument("ratio_threshold: need rho1 > rho0");
  if (!(rho0 >= 0 && rho1 <= 1))
    throw std::invalid_argument("ratio_threshold: ratios outside [0,1]");
  if (!(h > 0)) throw std::invalid_argument("ratio_threshold: h must be > 0");
  if (!(c > 0)) throw std::invalid_argument("ratio_threshold: c must be > 0");
  if (!(lambda >= 0))
    throw std::invalid_argument("ratio_threshold: lambda < 0");
  if (std::abs(rho0 + rho1 - 1.0) <= 1e-12) return 1.0;
  const double num =
      -std::log((c * (1.0 - rho1) * h + lambda) / (c * (1.0 - rho0) * h + lambda));
  const double den =
      std::log((c * rho1 * h + lambda) / (c * rho0 * h + lambda));
  if (!std::isfinite(den) || den == 0.0)
    throw std::invalid_argument(
        "ratio_threshold: degenerate denominator (rho0 = 0 with lambda = 0?)");
  return num / den;
}

/// Optimal OOK count threshold: decode bit 1 iff m > tau. The lambda = 0
/// limit returns 0, i.e. any nonzero count decodes 1.
inline double ook_threshold(double n_a, double h, double lambda) {
  if (!(n_a > 0)) throw std::invalid_argument("ook_threshold: n_a must be > 0");
  if (!(h > 0)) throw std::invalid_argument("ook_threshold: h must be > 0");
  if (!(lambda >= 0)) throw std::invalid_argument("ook_threshold: lambda < 0");
  if (lambda == 0.0) return 0.0;
  return n_a * h / std::log((n_a * h + lambda) / lambda);
}

/// Mean-channel-information decoder: the Poisson ML rule with the mean gain
/// substituted for the instantaneous one.
inline int decode_mean_ci(const ReceivedVector& m, const Constellation& cst,
                          double mean_h, double lambda) {
  return decode_ml_poisson(m, cst, mean_h, lambda);
}

/// Full-statistics decoder: argmax_b E_h[P(m | b, h)], the expectation taken
/// over the gain distribution by quadrature. Likelihoods are handled in log
/// space and rescaled by their maximum before integration.
inline int decode_full_csi(const ReceivedVector& m, const Constellation& cst,
                           const ChannelDistribution& dist, double lambda) {
  cst.validate();
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("decode_full_csi: dimension mismatch");
  if (!(lambda >= 0))
    throw std::invalid_argument("decode_full_csi: lambda < 0");
  detail::BestSymbol best(cst);
  for (int b = 0; b < cst.m; ++b) {
    const double log_mean_lik = dist.log_expect([&](double h) {
      double acc = 0.0;
      for (int i = 0; i < cst.k; ++i) {
        const double lp =
            log_pmf_poisson(m[i], cst.symbols[b][i] * h + lambda);
        if (lp == kNegInf) return kNegInf;
        acc += lp;
      }
      return acc;
    });
    if (log_mean_lik != kNegInf) best.offer(b, log_mean_lik);
  }
  return best.get();
}

/// Precomputed moments for the expected-log decoder: E[h] and, per symbol
/// and port, E_h[log(a_ib h + lambda)].
struct ExpectedLogTable {
  double mean_h = 0.0;
  std::vector<std::vector<double>> elog;  // [symbol][axis]
};

inline ExpectedLogTable make_expected_log_table(const Constellation& cst,
                                                const ChannelDistribution& dist,
                                                double lambda) {
  if (!(lambda >= 0))
    throw std::invalid_argument("make_expected_log_table: lambda < 0");
  ExpectedLogTable table;
  table.mean_h = dist.expect([](double h) { return h; });
  table.elog.assign(cst.m, std::vector<double>(cst.k, 0.0));
  for (int b = 0; b < cst.m; ++b)
    for (int i = 0; i < cst.k; ++i) {
      const double a = cst.symbols[b][i];
      if (a <= 0.0 && lambda <= 0.0) {
        table.elog[b][i] = kNegInf;
        continue;
      }
      table.elog[b][i] =
          dist.expect([&](double h) { return std::log(a * h + lambda); });
    }
  return table;
}

/// Expected-log decoder: argmax_b [ -sum_i a_ib E[h] + sum_i m_i
/// E_h[log(a_ib h + lambda)] ]. Needs only the precomputed moments, not the
/// full gain distribution.
inline int decode_expected_log(const ReceivedVector& m,
                               const Constellation& cst,
                               const ExpectedLogTable& table, double lambda) {
  (void)lambda;
  if (static_cast<int>(m.size()) != cst.k)
    throw std::invalid_argument("decode_expected_log: dimension mismatch");
  detail::BestSymbol best(cst);
  for (int b = 0; b < cst.m; ++b) {
    double score = -cst.symbol_sum(b) * table.mean_h;
    bool possible = true;
    for (int i = 0; i < cst.k; ++i) {
      const double e = table.elog[b][i];
      if (e == kNegInf) {
        if (m[i] > 0) {
          possible = false;
          break;
        }
        continue;
      }
      score += double(m[i]) * e;
    }
    if (possible) best.offer(b, score);
  }
  return best.get();
}

/// Pairwise decision boundary under the Poisson rule: the set
/// sum_i w_i m_i + offset = 0 with w_i = log(mu_ib / mu_ib') and offset =
/// (c_b' - c_b) h. Symbol b is preferred on the nonnegative side.
struct Hyperplane {
  std::vector<double> w;
  double offset = 0.0;

  double eval(const ReceivedVector& m) const {
    double acc = offset;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * double(m[i]);
    return acc;
  }
};

inline Hyperplane decoding_boundary_hyperplane(const Constellation& cst, int b,
                                               int b_prime, double h,
                                               double lambda) {
  cst.validate();
  if (b < 0 || b >= cst.m || b_prime < 0 || b_prime >= cst.m || b == b_prime)
    throw std::invalid_argument("decoding_boundary_hyperplane: bad symbols");
  Hyperplane plane;
  plane.w.resize(cst.k);
  for (int i = 0; i < cst.k; ++i) {
    const double mu_b = cst.symbols[b][i] * h + lambda;
    const double mu_bp = cst.symbols[b_prime][i] * h + lambda;
    if (!(mu_b > 0) || !(mu_bp > 0))
      throw std::invalid_argument(
          "decoding_boundary_hyperplane: zero port mean (needs lambda > 0 or "
          "positive counts)");
    plane.w[i] = std::log(mu_b / mu_bp);
  }
  plane.offset = (cst.symbol_sum(b_prime) - cst.symbol_sum(b)) * h;
  return plane;
}

/// Independent per-axis decoding for rectangular lattices: each axis
/// thresholds its count against the adjacent-level boundaries. Returns the
/// chosen level index per axis.
inline std::vector<int> per_axis_decode(
    const ReceivedVector& m, const std::vector<std::vector<double>>& levels,
    double h, double lambda) {
  if (m.size() != levels.size())
    throw std::invalid_argument("per_axis_decode: dimension mismatch");
  if (!(h > 0 && h <= 1.0))
    throw std::invalid_argument("per_axis_decode: h must lie in (0,1]");
  if (!(lambda >= 0)) throw std::invalid_argument("per_axis_decode: lambda < 0");
  std::vector<int> out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& lv = levels[i];
    if (lv.size() < 2)
      throw std::invalid_argument("per_axis_decode: axis needs >= 2 levels");
    int level = 0;
    for (std::size_t j = 0; j + 1 < lv.size(); ++j) {
      const double a0 = lv[j], a1 = lv[j + 1];
      if (!(a1 > a0))
        throw std::invalid_argument(
            "per_axis_decode: levels must be strictly increasing "
            "(equal levels carry no information)");
      double tau;
      if (lambda == 0.0 && a0 == 0.0) {
        tau = 0.0;  // any signal molecule rules out the silent level
      } else {
        tau = (a1 - a0) * h /
              std::log((a1 * h + lambda) / (a0 * h + lambda));
      }
      if (double(m[i]) > tau) level = static_cast<int>(j) + 1;
    }
    out[i] = level;
  }
  return out;
}

/// Decoded symbol at every integer grid point of [0, grid_max]^k, k = 2 or 3.
struct DecisionRegionRaster {
  int k = 2;
  Count grid_max = 0;
  std::vector<std::int32_t> cells;  // row-major, first axis slowest

  std::int32_t at(Count m1, Count m2, Count m3 = 0) const {
    const Count g = grid_max + 1;
    const std::size_t idx = k == 2
                                ? static_cast<std::size_t>(m1 * g + m2)
                                : static_cast<std::size_t>((m1 * g + m2) * g + m3);
    return cells[idx];
  }

  void write_csv(std::ostream& os) const {
    os << (k == 2 ? "m1,m2,symbol\n" : "m1,m2,m3,symbol\n");
    const Count g = grid_max;
    if (k == 2) {
      for (Count m1 = 0; m1 <= g; ++m1)
        for (Count m2 = 0; m2 <= g; ++m2)
          os << m1 << ',' << m2 << ',' << at(m1, m2) << '\n';
    } else {
      for (Count m1 = 0; m1 <= g; ++m1)
        for (Count m2 = 0; m2 <= g; ++m2)
          for (Count m3 = 0; m3 <= g; ++m3)
            os << m1 << ',' << m2 << ',' << m3 << ',' << at(m1, m2, m3) << '\n';
    }
  }
};

/// Evaluate a decoder at every grid point. Rows are distributed over
/// threads; cells are written by index, so the output is identical for any
/// worker count.
inline DecisionRegionRaster raster_regions(
    const std::function<int(const ReceivedVector&)>& decode, int k,
    Count grid_max, int threads = 0) {
  if (k != 2 && k != 3)
    throw std::invalid_argument("raster_regions: k must be 2 or 3");
  if (grid_max < 0) throw std::invalid_argument("raster_regions: bad grid");
  DecisionRegionRaster raster;
  raster.k = k;
  raster.grid_max = grid_max;
  const Count g = grid_max + 1;
  raster.cells.assign(static_cast<std::size_t>(std::pow(double(g), k)), -1);

  unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(g));
  auto run_rows = [&](Count row_begin, Count row_end) {
    ReceivedVector m(k);
    for (Count m1 = row_begin; m1 < row_end; ++m1) {
      m[0] = m1;
      for (Count m2 = 0; m2 < g; ++m2) {
        m[1] = m2;
        if (k == 2) {
          raster.cells[static_cast<std::size_t>(m1 * g + m2)] = decode(m);
        } else {
          for (Count m3 = 0; m3 < g; ++m3) {
            m[2] = m3;
            raster.cells[static_cast<std::size_t>((m1 * g + m2) * g + m3)] =
                decode(m);
          }
        }
      }
    }
  };
  if (n_workers <= 1) {
    run_rows(0, g);
  } else {
    std::vector<std::thread> pool;
    const Count chunk = (g + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      const Count lo = w * chunk;
      const Count hi = std::min<Count>(g, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return raster;
}

}  // namespace molcomm
