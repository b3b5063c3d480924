#pragma once
// Constellation construction and analysis: rectangular lattices, ratio-based
// (MAxRSK) families, the symmetric binary and (3,3) special cases, the
// channel-free design-rule checker, and molecular-budget normalization.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace molcomm {

inline constexpr int kMaxOrder = 4096;  // enumeration guard
inline constexpr int kMaxAxes = 16;

/// K nonnegative ratios summing to one; the direction of a MAxRSK symbol.
struct RatioVector {
  std::vector<double> r;

  static RatioVector of(std::vector<double> values) {
    RatioVector rv{std::move(values)};
    rv.validate();
    return rv;
  }

  /// 2-D ratio vector from the type-2 : type-1 molecule ratio. An infinite
  /// ratio maps to (0, 1).
  static RatioVector from_pair_ratio(double ratio) {
    if (std::isinf(ratio)) return RatioVector{{0.0, 1.0}};
    if (!(ratio >= 0))
      throw std::invalid_argument("RatioVector: pair ratio must be >= 0");
    return RatioVector{{1.0 / (1.0 + ratio), ratio / (1.0 + ratio)}};
  }

  /// K-D ratio vector from the K-1 per-type ratios relative to type 1.
  static RatioVector from_axis_ratios(const std::vector<double>& rest) {
    double total = 1.0;
    for (double x : rest) {
      if (!(x >= 0) || !std::isfinite(x))
        throw std::invalid_argument("RatioVector: axis ratios must be >= 0");
      total += x;
    }
    std::vector<double> r{1.0 / total};
    for (double x : rest) r.push_back(x / total);
    return RatioVector{std::move(r)};
  }

  void validate() const {
    if (r.empty()) throw std::invalid_argument("RatioVector: empty");
    double sum = 0.0;
    for (double x : r) {
      if (!(x >= 0.0) || !(x <= 1.0) || !std::isfinite(x))
        throw std::invalid_argument("RatioVector: entries must be in [0,1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("RatioVector: entries must sum to 1");
  }
};

/// Ordered set of K-dimensional nonnegative symbol vectors. Symbol values
/// are real at design time; integerization to whole molecules happens at
/// transmit-sampling time in the reception model.
struct Constellation {
  int k = 0;
  int m = 0;
  std::vector<std::vector<double>> symbols;  // m rows of k counts
  /// Preference used to resolve exact likelihood ties: lower rank wins.
  /// Defaults to symbol index; the symmetric binary constructor reverses it
  /// so that ties decode to bit 1 (the published comparator convention).
  std::vector<int> tie_rank;
  std::string label;

  double symbol_sum(int b) const {
    return std::accumulate(symbols[b].begin(), symbols[b].end(), 0.0);
  }

  /// Per-axis concentration ratios of symbol b.
  std::vector<double> ratios(int b) const {
    const double sum = symbol_sum(b);
    if (!(sum > 0))
      throw std::invalid_argument("Constellation: zero-sum symbol has no ratios");
    std::vector<double> out(symbols[b]);
    for (double& x : out) x /= sum;
    return out;
  }

  bool equal_sums(double rel_tol = 1e-9) const {
    const double c0 = symbol_sum(0);
    for (int b = 1; b < m; ++b)
      if (std::abs(symbol_sum(b) - c0) > rel_tol * std::max(1.0, std::abs(c0)))
        return false;
    return true;
  }

  void validate() const {
    if (k < 1 || k > kMaxAxes)
      throw std::invalid_argument("Constellation: axis count out of range");
    if (m < 1 || m > kMaxOrder)
      throw std::invalid_argument("Constellation: order out of range");
    if (static_cast<int>(symbols.size()) != m)
      throw std::invalid_argument("Constellation: symbol count != m");
    for (const auto& s : symbols) {
      if (static_cast<int>(s.size()) != k)
        throw std::invalid_argument("Constellation: symbol of wrong dimension");
      for (double x : s)
        if (!(x >= 0) || !std::isfinite(x))
          throw std::invalid_argument(
              "Constellation: counts must be finite and nonnegative");
    }
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        double diff = 0.0, scale = 1.0;
        for (int i = 0; i < k; ++i) {
          diff = std::max(diff, std::abs(symbols[a][i] - symbols[b][i]));
          scale = std::max({scale, std::abs(symbols[a][i])});
        }
        if (diff <= 1e-12 * scale)
          throw std::invalid_argument("Constellation: duplicate symbols " +
                                      std::to_string(a) + " and " +
                                      std::to_string(b));
      }
    if (!tie_rank.empty()) {
      std::vector<int> seen(m, 0);
      if (static_cast<int>(tie_rank.size()) != m)
        throw std::invalid_argument("Constellation: tie_rank size mismatch");
      for (int r : tie_rank) {
        if (r < 0 || r >= m || seen[r]++)
          throw std::invalid_argument("Constellation: tie_rank not a permutation");
      }
    }
  }

  int rank_of(int b) const {
    return tie_rank.empty() ? b : tie_rank[b];
  }
};

namespace detail {
inline Constellation finish(Constellation c) {
  c.m = static_cast<int>(c.symbols.size());
  c.k = c.symbols.empty() ? 0 : static_cast<int>(c.symbols[0].size());
  c.validate();
  return c;
}
}  // namespace detail

/// Cartesian-product lattice: all k-tuples (i1*spacing, ..., ik*spacing),
/// i in {0..m_per_axis-1}, row-major (last axis fastest). Order M =
/// m_per_axis^k.
inline Constellation rectangular_lattice(int k, int m_per_axis,
                                         double spacing) {
  if (k < 1 || k > kMaxAxes)
    throw std::invalid_argument("rectangular_lattice: bad axis count");
  if (m_per_axis < 2)
    throw std::invalid_argument("rectangular_lattice: need >= 2 levels");
  if (!(spacing > 0))
    throw std::invalid_argument("rectangular_lattice: spacing must be > 0");
  long long order = 1;
  for (int i = 0; i < k; ++i) {
    order *= m_per_axis;
    if (order > kMaxOrder)
      throw std::invalid_argument("rectangular_lattice: order exceeds limit");
  }
  Constellation c;
  c.label = "lattice(" + std::to_string(k) + "," + std::to_string(order) + ")";
  std::vector<int> idx(k, 0);
  for (long long n = 0; n < order; ++n) {
    std::vector<double> sym(k);
    for (int i = 0; i < k; ++i) sym[i] = idx[i] * spacing;
    c.symbols.push_back(std::move(sym));
    for (int i = k - 1; i >= 0; --i) {
      if (++idx[i] < m_per_axis) break;
      idx[i] = 0;
    }
  }
  return detail::finish(std::move(c));
}

/// On-off keying: nothing for bit 0, n_a molecules for bit 1.
inline Constellation ook(double n_a) {
  auto c = rectangular_lattice(1, 2, n_a);
  c.label = "ook";
  return c;
}

/// Ratio shift keying: symbol b = c * R_b; every symbol sums to c exactly.
inline Constellation maxrsk(double c_budget,
                            const std::vector<RatioVector>& ratio_vectors) {
  if (!(c_budget > 0)) throw std::invalid_argument("maxrsk: budget must be > 0");
  if (ratio_vectors.empty())
    throw std::invalid_argument("maxrsk: need at least one ratio vector");
  const std::size_t k = ratio_vectors.front().r.size();
  for (const auto& rv : ratio_vectors) {
    rv.validate();
    if (rv.r.size() != k)
      throw std::invalid_argument("maxrsk: inconsistent dimensions");
  }
  for (std::size_t a = 0; a < ratio_vectors.size(); ++a)
    for (std::size_t b = a + 1; b < ratio_vectors.size(); ++b) {
      double diff = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        diff = std::max(diff,
                        std::abs(ratio_vectors[a].r[i] - ratio_vectors[b].r[i]));
      if (diff <= 1e-12)
        throw std::invalid_argument("maxrsk: duplicate ratio vectors");
    }
  Constellation c;
  c.label = "maxrsk(" + std::to_string(k) + "," +
            std::to_string(ratio_vectors.size()) + ")";
  for (const auto& rv : ratio_vectors) {
    std::vector<double> sym(k);
    for (std::size_t i = 0; i < k; ++i) sym[i] = c_budget * rv.r[i];
    c.symbols.push_back(std::move(sym));
  }
  return detail::finish(std::move(c));
}

/// Binary RSK: bit b carried by ratio rho_b of type-1 molecules.
inline Constellation brsk(double rho0, double rho1, double c_budget) {
  if (!(rho0 >= 0 && rho0 <= 1 && rho1 >= 0 && rho1 <= 1))
    throw std::invalid_argument("brsk: ratios must lie in [0,1]");
  if (!(rho1 > rho0)) throw std::invalid_argument("brsk: need rho1 > rho0");
  auto c = maxrsk(c_budget, {RatioVector::of({rho0, 1.0 - rho0}),
                             RatioVector::of({rho1, 1.0 - rho1})});
  c.label = "brsk";
  return c;
}

/// Symmetric binary RSK: swap-symmetric symbols (c*rho0, c*(1-rho0)) and
/// (c*(1-rho0), c*rho0). The two counts are computed once and swapped, so
/// the symmetry is exact down to the bit and likelihood ties cancel
/// exactly. Ties decode to bit 1, matching the published comparator rule
/// "1 if m1 >= m2".
inline Constellation sbrsk(double rho0, double c_budget) {
  if (!(rho0 >= 0 && rho0 < 0.5))
    throw std::invalid_argument("sbrsk: rho0 must lie in [0, 1/2)");
  if (!(c_budget > 0)) throw std::invalid_argument("sbrsk: budget must be > 0");
  const double lo = c_budget * rho0;
  const double hi = c_budget * (1.0 - rho0);
  Constellation c;
  c.symbols = {{lo, hi}, {hi, lo}};
  c.label = "sbrsk";
  c.tie_rank = {1, 0};
  return detail::finish(std::move(c));
}

/// Three-type, three-symbol symmetric RSK built from cyclic permutations of
/// (p, 1-2p, p); the two count values are shared bit-exactly across symbols.
inline Constellation smaxrsk33(double p, double c_budget) {
  if (!(p > 0 && p < 0.5))
    throw std::invalid_argument("smaxrsk33: p must lie in (0, 1/2)");
  if (std::abs(p - 1.0 / 3.0) < 1e-12)
    throw std::invalid_argument("smaxrsk33: p = 1/3 collapses all symbols");
  if (!(c_budget > 0))
    throw std::invalid_argument("smaxrsk33: budget must be > 0");
  const double x = c_budget * p;
  const double y = c_budget * (1.0 - 2.0 * p);
  Constellation c;
  c.symbols = {{x, y, x}, {y, x, x}, {x, x, y}};
  c.label = "smaxrsk33";
  return detail::finish(std::move(c));
}

/// Result of the channel-free design-rule check. When ok is false the
/// (b, b_prime, axis) triple pinpoints the first violation; axis = -1 means
/// the symbol sums differ.
struct ChannelFreeWitness {
  bool ok = true;
  int b = -1;
  int b_prime = -1;
  int axis = -1;

  std::string describe() const {
    if (ok) return "channel-free";
    std::ostringstream os;
    if (axis < 0)
      os << "symbol sums differ (symbols " << b << ", " << b_prime << ")";
    else
      os << "ratio pair at axis " << axis << " breaks the swap pattern for "
         << "symbols (" << b << ", " << b_prime << ")";
    return os.str();
  }
};

/// True iff the constellation admits channel-independent ML decoding: all
/// symbol sums equal, and for every symbol pair the per-axis ratio pairs are
/// either equal or drawn from one swapped pair {alpha, beta}. Matching uses
/// relative tolerance 1e-9.
inline ChannelFreeWitness check_channel_free(const Constellation& cst) {
  cst.validate();
  const double tol = 1e-9;
  const double c0 = cst.symbol_sum(0);
  for (int b = 1; b < cst.m; ++b) {
    if (!(cst.symbol_sum(b) > 0) ||
        std::abs(cst.symbol_sum(b) - c0) > tol * std::max(1.0, c0))
      return {false, 0, b, -1};
  }
  if (!(c0 > 0)) return {false, 0, 0, -1};

  std::vector<std::vector<double>> r(cst.m);
  for (int b = 0; b < cst.m; ++b) r[b] = cst.ratios(b);

  auto same = [tol](double x, double y) {
    return std::abs(x - y) <= tol * std::max(1.0, std::max(x, y));
  };
  for (int b = 0; b < cst.m; ++b) {
    for (int bp = b + 1; bp < cst.m; ++bp) {
      bool have_pair = false;
      double alpha = 0.0, beta = 0.0;
      for (int i = 0; i < cst.k; ++i) {
        const double x = r[b][i], y = r[bp][i];
        if (same(x, y)) continue;
        if (!have_pair) {
          alpha = x;
          beta = y;
          have_pair = true;
          continue;
        }
        const bool forward = same(x, alpha) && same(y, beta);
        const bool swapped = same(x, beta) && same(y, alpha);
        if (!forward && !swapped) return {false, b, bp, i};
      }
    }
  }
  return {};
}

/// Minimum Euclidean distance between symbol pairs in count space.
inline double min_symbol_separation(const Constellation& cst) {
  cst.validate();
  if (cst.m < 2)
    throw std::invalid_argument("min_symbol_separation: need >= 2 symbols");
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < cst.m; ++a)
    for (int b = a + 1; b < cst.m; ++b) {
      double d2 = 0.0;
      for (int i = 0; i < cst.k; ++i) {
        const double d = cst.symbols[a][i] - cst.symbols[b][i];
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
  return best;
}

/// Exact rational q = num/den, kept in lowest terms; used for the budget
/// table so its entries match algebra, not floating point.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    return Rational{g ? n / g : n, g ? d / g : d};
  }

  double value(double c = 1.0) const {
    return c * static_cast<double>(num) / static_cast<double>(den);
  }

  bool operator==(const Rational&) const = default;

  /// Render as a coefficient of c, e.g. "2c" or "4c/3".
  std::string times_c() const {
    std::string s = (num == 1 ? "" : std::to_string(num)) + "c";
    if (den != 1) s += "/" + std::to_string(den);
    return s;
  }
};

/// Symbol spacings and budgets for multi-axis vs. single-axis rectangular
/// constellations of the same order under a shared per-bit budget. Spacing
/// coefficients multiply the per-bit budget c.
struct BudgetPlan {
  double per_bit_budget = 0.0;
  int bits_per_symbol = 0;
  Rational spacing_multi_axis;   // c' for the k-axis lattice
  Rational spacing_single_axis;  // c' for the 1-axis lattice of equal order
  Rational per_symbol_budget;
};

/// Equal-budget normalization for a k-axis lattice of the given total order
/// (which must be M^k with M a power of two, M >= 2).
inline BudgetPlan normalize_budget(int k, long long order,
                                   double per_bit_budget) {
  if (k < 1 || k > kMaxAxes)
    throw std::invalid_argument("normalize_budget: bad axis count");
  if (!(per_bit_budget > 0))
    throw std::invalid_argument("normalize_budget: budget must be > 0");
  long long m_axis = std::llround(std::pow(double(order), 1.0 / k));
  bool found = false;
  for (long long cand : {m_axis - 1, m_axis, m_axis + 1}) {
    if (cand < 2) continue;
    long long p = 1;
    for (int i = 0; i < k; ++i) p *= cand;
    if (p == order) {
      m_axis = cand;
      found = true;
      break;
    }
  }
  if (!found)
    throw std::invalid_argument(
        "normalize_budget: order is not a perfect k-th power of an integer >= 2");
  if ((m_axis & (m_axis - 1)) != 0)
    throw std::invalid_argument(
        "normalize_budget: per-axis order must be a power of two "
        "(bits per symbol must be integral)");
  int n_bits = 0;
  for (long long v = m_axis; v > 1; v >>= 1) ++n_bits;

  BudgetPlan plan;
  plan.per_bit_budget = per_bit_budget;
  plan.bits_per_symbol = k * n_bits;
  plan.spacing_multi_axis = Rational::of(2LL * n_bits, m_axis - 1);
  plan.spacing_single_axis = Rational::of(2LL * k * n_bits, order - 1);
  plan.per_symbol_budget = Rational::of(plan.bits_per_symbol, 1);
  return plan;
}

}  // namespace molcomm
