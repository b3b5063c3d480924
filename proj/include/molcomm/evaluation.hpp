#pragma once
// Error-probability evaluation: exact truncated enumeration, Monte Carlo
// for static channels, trajectory simulation for mobile ones, budget sweeps
// and imperfect-channel-knowledge comparisons.
//
// Monte Carlo work is split into fixed-size blocks; block b always uses
// substream(seed, b), and block results are merged in index order, so the
// output is bit-identical for any thread count.
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "molcomm/channel.hpp"
#include "molcomm/constellation.hpp"
#include "molcomm/decoder.hpp"
#include "molcomm/reception.hpp"
#include "molcomm/rng.hpp"

namespace molcomm {

/// Scenario asks for something the evaluator cannot provide (e.g. an exact-h
/// decoder on a mobile channel without genie mode, or an enumeration too
/// large to hold).
struct InfeasibleScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ErrorEstimate {
  enum class Method { Exact, MonteCarlo };

  double value = 0.0;
  Method method = Method::Exact;
  double half_width = 0.0;  ///< 95% CI half-width; 0 for exact results
  std::uint64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  static ErrorEstimate exact(double p) { return {p, Method::Exact, 0.0, 0, p, p}; }
};

/// Wilson 95% score interval for errors/n; returns {low, high, half-width}.
inline std::array<double, 3> wilson_interval(std::uint64_t errors,
                                             std::uint64_t n,
                                             double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0, 0.5};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double rad =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - rad), std::min(1.0, center + rad), rad};
}

inline ErrorEstimate monte_carlo_estimate(std::uint64_t errors,
                                          std::uint64_t n) {
  const auto [lo, hi, rad] = wilson_interval(errors, n);
  return {static_cast<double>(errors) / static_cast<double>(n),
          ErrorEstimate::Method::MonteCarlo, rad, n, lo, hi};
}

enum class DecoderKind {
  ExactML,
  PoissonML,
  ChannelFree,
  RatioThreshold,
  OokThreshold,
  MeanCI,
  FullCSI,
  ExpectedLog
};

inline const char* to_string(DecoderKind k) {
  switch (k) {
    case DecoderKind::ExactML: return "exact-ml";
    case DecoderKind::PoissonML: return "poisson-ml";
    case DecoderKind::ChannelFree: return "channel-free";
    case DecoderKind::RatioThreshold: return "ratio-threshold";
    case DecoderKind::OokThreshold: return "ook-threshold";
    case DecoderKind::MeanCI: return "mean-ci";
    case DecoderKind::FullCSI: return "full-csi";
    case DecoderKind::ExpectedLog: return "expected-log";
  }
  return "?";
}

struct DecoderSpec {
  DecoderKind kind = DecoderKind::PoissonML;
  /// Grants mobile decoders oracle access to the instantaneous gain.
  bool genie = false;

  /// Decoders that need the instantaneous h and therefore only run on
  /// mobile channels in genie mode.
  bool needs_exact_h() const {
    return kind == DecoderKind::ExactML || kind == DecoderKind::PoissonML ||
           kind == DecoderKind::RatioThreshold ||
           kind == DecoderKind::OokThreshold;
  }
};

enum class SlotSchedule { BitDuration, SamplingOffset };

struct Scenario {
  Constellation cst;
  ChannelParams channel = ChannelParams::defaults();
  ReceiverType receiver = ReceiverType::Passive;
  bool mobile = false;
  ReceptionParams reception;
  DecoderSpec decoder;
  int bits = 50;  ///< slots per mobile run
  SlotSchedule schedule = SlotSchedule::BitDuration;
  double known_h = 0.0;  ///< static decoding gain; 0 derives it from geometry
  /// Channel parameters the decoder believes in; unset means the true ones.
  std::optional<ChannelParams> decoder_channel;
  std::string label;

  const ChannelParams& decoder_params() const {
    return decoder_channel ? *decoder_channel : channel;
  }

  double slot_spacing() const {
    return schedule == SlotSchedule::BitDuration ? channel.t_b : channel.tau_s;
  }

  /// Gain of the frozen channel (static scenarios).
  double static_h() const {
    if (known_h > 0.0) return known_h;
    return receiver == ReceiverType::Passive
               ? passive_cir(channel.r0, channel)
               : absorbing_hit_prob(channel.r0, channel);
  }

  void validate() const {
    cst.validate();
    channel.validate();
    reception.validate();
    if (decoder_channel) decoder_channel->validate();
    if (bits < 1) throw std::invalid_argument("Scenario: bits must be >= 1");
    if (decoder.kind == DecoderKind::ChannelFree) {
      const auto w = check_channel_free(cst);
      if (!w.ok)
        throw InfeasibleScenario(
            "Scenario: channel-free decoder on a constellation that is not "
            "channel-free: " +
            w.describe());
    }
  }
};

// ---------------------------------------------------------------------------
// Decoder bindings
// ---------------------------------------------------------------------------

using DecodeFn = std::function<int(const ReceivedVector&)>;

namespace detail {

inline void require_binary_scalar(const Constellation& cst, const char* who) {
  if (cst.k != 1 || cst.m != 2 || !(cst.symbols[1][0] > cst.symbols[0][0]))
    throw InfeasibleScenario(std::string(who) +
                             ": needs a 1-axis binary constellation with "
                             "ascending levels");
}

inline DecodeFn threshold_decoder(double tau) {
  return [tau](const ReceivedVector& m) {
    return double(m[0]) > tau ? 1 : 0;
  };
}

/// Binary RSK ratio rule: bit 1 iff m1 >= eta * m2.
inline DecodeFn ratio_rule_decoder(const Constellation& cst, double h,
                                   double lambda) {
  if (cst.k != 2 || cst.m != 2)
    throw InfeasibleScenario("ratio-threshold: needs a 2-axis binary RSK");
  const double c = cst.symbol_sum(0);
  const double rho0 = cst.symbols[0][0] / c;
  const double rho1 = cst.symbols[1][0] / c;
  const double eta = ratio_threshold(rho0, rho1, c, h, lambda);
  return [eta](const ReceivedVector& m) {
    return double(m[0]) >= eta * double(m[1]) ? 1 : 0;
  };
}

}  // namespace detail

/// Decoder for a frozen channel gain h. Mean/statistics decoders collapse to
/// the plain ML rule here because the gain distribution is a point mass.
inline DecodeFn make_static_decoder(const Scenario& s, double h) {
  const auto cst = s.cst;
  const double lambda = s.reception.lambda;
  switch (s.decoder.kind) {
    case DecoderKind::ExactML:
      return [cst, h, lambda](const ReceivedVector& m) {
        return decode_ml_exact(m, cst, h, lambda);
      };
    case DecoderKind::PoissonML:
    case DecoderKind::MeanCI:
    case DecoderKind::FullCSI:
    case DecoderKind::ExpectedLog:
      return [cst, h, lambda](const ReceivedVector& m) {
        return decode_ml_poisson(m, cst, h, lambda);
      };
    case DecoderKind::ChannelFree: {
      ChannelFreeDecoder dec(cst);
      return [dec](const ReceivedVector& m) { return dec.decode(m); };
    }
    case DecoderKind::RatioThreshold:
      return detail::ratio_rule_decoder(cst, h, lambda);
    case DecoderKind::OokThreshold: {
      detail::require_binary_scalar(cst, "ook-threshold");
      const double a0 = cst.symbols[0][0];
      const double a1 = cst.symbols[1][0];
      double tau;
      if (lambda == 0.0 && a0 == 0.0) {
        tau = 0.0;
      } else {
        tau = (a1 - a0) * h /
              std::log((a1 * h + lambda) / (a0 * h + lambda));
      }
      return detail::threshold_decoder(tau);
    }
  }
  throw std::logic_error("make_static_decoder: unknown decoder kind");
}

/// Smallest count decoding to bit 1 for a scalar OOK symbol pair under the
/// full-statistics rule, found by bisection (the likelihood ratio of the
/// mixed law is monotone in the count). Returns nullopt when no count in the
/// search range prefers bit 1.
inline std::optional<Count> full_csi_ook_threshold(
    const Constellation& cst, const ChannelDistribution& dist, double lambda) {
  detail::require_binary_scalar(cst, "full-csi threshold");
  if (!(cst.symbols[0][0] == 0.0))
    throw InfeasibleScenario("full-csi threshold: bit 0 must transmit nothing");
  const double n_a = cst.symbols[1][0];
  const Count hi_bound =
      truncation_bound(n_a, dist.h_max(), lambda, ReceptionModel::PoissonApprox);
  auto prefer_one = [&](Count m) {
    const double log_e1 = dist.log_expect([&](double h) {
      return log_pmf_poisson(m, n_a * h + lambda);
    });
    const double log_e0 = log_pmf_poisson(m, lambda);
    if (log_e1 == kNegInf) return false;
    if (log_e0 == kNegInf) return true;
    return log_e1 >= log_e0;
  };
  if (!prefer_one(hi_bound)) return std::nullopt;
  Count lo = 0, hi = hi_bound;
  while (lo < hi) {
    const Count mid = lo + (hi - lo) / 2;
    if (prefer_one(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

/// Per-slot decoders for a mobile run, built from the *believed* channel
/// parameters. Genie decoders instead receive the realized per-slot gain.
struct MobileDecoders {
  bool genie = false;
  std::vector<DecodeFn> per_slot;                          // if !genie
  std::function<int(const ReceivedVector&, double)> with_h;  // if genie
};

inline MobileDecoders make_mobile_decoders(const Scenario& s,
                                           const std::vector<double>& times) {
  MobileDecoders out;
  const auto& cst = s.cst;
  const double lambda = s.reception.lambda;
  const ChannelParams dp = s.decoder_params();

  if (s.decoder.needs_exact_h()) {
    if (!s.decoder.genie)
      throw InfeasibleScenario(
          "mobile scenario: decoder '" + std::string(to_string(s.decoder.kind)) +
          "' needs the exact channel gain; enable genie mode or pick a "
          "CSI-based decoder");
    out.genie = true;
    const auto kind = s.decoder.kind;
    out.with_h = [cst, lambda, kind](const ReceivedVector& m, double h) {
      switch (kind) {
        case DecoderKind::ExactML:
          return decode_ml_exact(m, cst, h, lambda);
        case DecoderKind::PoissonML:
          return decode_ml_poisson(m, cst, h, lambda);
        case DecoderKind::RatioThreshold:
          return detail::ratio_rule_decoder(cst, h, lambda)(m);
        case DecoderKind::OokThreshold: {
          detail::require_binary_scalar(cst, "ook-threshold");
          const double a1 = cst.symbols[1][0];
          const double tau = ook_threshold(a1, h, lambda);
          return double(m[0]) > tau ? 1 : 0;
        }
        default:
          throw std::logic_error("unexpected genie decoder");
      }
    };
    return out;
  }

  out.per_slot.reserve(times.size());
  switch (s.decoder.kind) {
    case DecoderKind::ChannelFree: {
      ChannelFreeDecoder dec(cst);
      for (std::size_t j = 0; j < times.size(); ++j)
        out.per_slot.emplace_back(
            [dec](const ReceivedVector& m) { return dec.decode(m); });
      break;
    }
    case DecoderKind::MeanCI: {
      for (double t : times) {
        const double mean_h = s.receiver == ReceiverType::Passive
                                  ? mean_passive_cir(t, dp)
                                  : mean_absorbing_cir_approx(t, dp);
        out.per_slot.emplace_back([cst, mean_h, lambda](const ReceivedVector& m) {
          return decode_mean_ci(m, cst, mean_h, lambda);
        });
      }
      break;
    }
    case DecoderKind::FullCSI: {
      const bool scalar_ook =
          cst.k == 1 && cst.m == 2 && cst.symbols[0][0] == 0.0;
      for (double t : times) {
        ChannelDistribution dist(t, dp, s.receiver);
        if (scalar_ook) {
          const auto m_star = full_csi_ook_threshold(cst, dist, lambda);
          if (m_star) {
            const Count thr = *m_star;
            out.per_slot.emplace_back([thr](const ReceivedVector& m) {
              return m[0] >= thr ? 1 : 0;
            });
          } else {
            out.per_slot.emplace_back([](const ReceivedVector&) { return 0; });
          }
        } else {
          out.per_slot.emplace_back(
              [cst, dist, lambda](const ReceivedVector& m) {
                return decode_full_csi(m, cst, dist, lambda);
              });
        }
      }
      break;
    }
    case DecoderKind::ExpectedLog: {
      for (double t : times) {
        ChannelDistribution dist(t, dp, s.receiver);
        ExpectedLogTable table = make_expected_log_table(cst, dist, lambda);
        out.per_slot.emplace_back(
            [cst, table, lambda](const ReceivedVector& m) {
              return decode_expected_log(m, cst, table, lambda);
            });
      }
      break;
    }
    default:
      throw std::logic_error("make_mobile_decoders: unhandled decoder kind");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

/// Exact symbol-error probability by truncated enumeration with equal
/// priors: P_e = 1 - (1/M) sum_b sum_{m decoded as b} P(m|b). The
/// truncation envelope leaves < 1e-20 of mass per port outside.
inline ErrorEstimate exact_error_probability(const Constellation& cst,
                                             const DecodeFn& decode, double h,
                                             double lambda,
                                             ReceptionModel model) {
  if (cst.k > 3)
    throw InfeasibleScenario(
        "exact_error_probability: K > 3; use Monte Carlo");
  ReceptionParams rec{lambda, model};

  std::vector<Count> bound(cst.k, 0);
  for (int i = 0; i < cst.k; ++i)
    for (int b = 0; b < cst.m; ++b)
      bound[i] =
          std::max(bound[i], truncation_bound(cst.symbols[b][i], h, lambda, model));
  double cells = 1.0;
  for (Count b : bound) cells *= double(b + 1);
  if (cells > 1e8)
    throw InfeasibleScenario(
        "exact_error_probability: truncated support exceeds 1e8 cells; use "
        "Monte Carlo");

  // per-port PMF tables: tab[b][i][m]
  std::vector<std::vector<std::vector<double>>> tab(
      cst.m, std::vector<std::vector<double>>(cst.k));
  for (int b = 0; b < cst.m; ++b)
    for (int i = 0; i < cst.k; ++i) {
      auto& col = tab[b][i];
      col.resize(static_cast<std::size_t>(bound[i]) + 1);
      for (Count m = 0; m <= bound[i]; ++m)
        col[static_cast<std::size_t>(m)] =
            model == ReceptionModel::Exact
                ? pmf_exact(m, integerize(cst.symbols[b][i]), h, lambda)
                : pmf_poisson(m, cst.symbols[b][i] * h + lambda);
    }

  double correct_mass = 0.0;
  ReceivedVector m(cst.k, 0);
  for (;;) {
    int decoded = -1;
    try {
      decoded = decode(m);
    } catch (const ImpossibleObservation&) {
      decoded = -1;  // zero probability under every symbol
    }
    if (decoded >= 0) {
      double p = 1.0;
      for (int i = 0; i < cst.k; ++i)
        p *= tab[decoded][i][static_cast<std::size_t>(m[i])];
      correct_mass += p;
    }
    int axis = cst.k - 1;
    while (axis >= 0) {
      if (++m[axis] <= bound[axis]) break;
      m[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  const double pe = std::clamp(1.0 - correct_mass / cst.m, 0.0, 1.0);
  return ErrorEstimate::exact(pe);
}

// ---------------------------------------------------------------------------
// Monte Carlo engines
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t kBlockTrials = 2048;

/// Run fn(block_index, trials_in_block) over ceil(trials/kBlockTrials)
/// blocks on the requested number of threads.
template <typename Fn>
void run_blocks(std::uint64_t trials, int threads, Fn&& fn) {
  const std::uint64_t n_blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  unsigned n_workers = threads > 0
                           ? static_cast<unsigned>(threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::uint64_t>(n_workers, std::max<std::uint64_t>(1, n_blocks)));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t blk = next.fetch_add(1);
      if (blk >= n_blocks) return;
      const std::uint64_t lo = blk * kBlockTrials;
      const std::uint64_t hi = std::min(trials, lo + kBlockTrials);
      fn(blk, hi - lo);
    }
  };
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
}

}  // namespace detail

/// Monte Carlo symbol-error estimate over a frozen channel. Deterministic
/// for a given (scenario, trials, seed) regardless of thread count.
inline ErrorEstimate monte_carlo_static(const Scenario& s, std::uint64_t trials,
                                        std::uint64_t seed, int threads = 0) {
  s.validate();
  if (trials < 1)
    throw std::invalid_argument("monte_carlo_static: trials must be >= 1");
  const double h = s.static_h();
  const DecodeFn decode = make_static_decoder(s, h);
  const std::uint64_t n_blocks =
      (trials + detail::kBlockTrials - 1) / detail::kBlockTrials;
  std::vector<std::uint64_t> block_errors(n_blocks, 0);

  detail::run_blocks(trials, threads, [&](std::uint64_t blk, std::uint64_t n) {
    auto rng = substream(seed, blk);
    std::uniform_int_distribution<int> pick(0, s.cst.m - 1);
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const int b = pick(rng);
      const ReceivedVector m = sample_received(b, s.cst, h, s.reception, rng);
      errors += decode(m) != b;
    }
    block_errors[blk] = errors;
  });

  std::uint64_t errors = 0;
  for (std::uint64_t e : block_errors) errors += e;
  return monte_carlo_estimate(errors, trials);
}

struct CurvePoint {
  double t = 0.0;
  ErrorEstimate est;
};

struct MobileResult {
  std::vector<CurvePoint> curve;
  /// Error rate averaged over the whole slot window, with a CI computed
  /// from per-trial error fractions (trials are independent; slots within a
  /// trial share a trajectory and are not).
  ErrorEstimate time_average;
};

/// Trajectory Monte Carlo for mobile scenarios: each trial draws one TX/RX
/// Brownian path sampled at the slot times, transmits `bits` random symbols
/// through the per-slot gains, and decodes with the scenario's decoder.
inline MobileResult monte_carlo_mobile(const Scenario& s, std::uint64_t trials,
                                       std::uint64_t seed, int threads = 0) {
  s.validate();
  if (!s.mobile)
    throw std::invalid_argument("monte_carlo_mobile: scenario is not mobile");
  if (trials < 1)
    throw std::invalid_argument("monte_carlo_mobile: trials must be >= 1");
  const int n_slots = s.bits;
  const double dt = s.slot_spacing();
  std::vector<double> times(n_slots);
  for (int j = 0; j < n_slots; ++j) times[j] = j * dt;

  const MobileDecoders dec = make_mobile_decoders(s, times);
  auto cir = [&](double r) {
    if (s.receiver == ReceiverType::Passive) return passive_cir(r, s.channel);
    return r <= s.channel.r_rx ? 1.0 : absorbing_hit_prob(r, s.channel);
  };

  const std::uint64_t n_blocks =
      (trials + detail::kBlockTrials - 1) / detail::kBlockTrials;
  struct BlockAcc {
    std::vector<std::uint64_t> slot_errors;
    double frac_sum = 0.0;
    double frac_sq_sum = 0.0;
  };
  std::vector<BlockAcc> acc(n_blocks);

  const double step_sigma = std::sqrt(2.0 * s.channel.d_tr * dt);
  detail::run_blocks(trials, threads, [&](std::uint64_t blk, std::uint64_t n) {
    auto rng = substream(seed, blk);
    std::uniform_int_distribution<int> pick(0, s.cst.m - 1);
    std::normal_distribution<double> step(0.0, step_sigma);
    BlockAcc& a = acc[blk];
    a.slot_errors.assign(n_slots, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      double tx[3] = {0.0, 0.0, 0.0};
      double rx[3] = {s.channel.r0, 0.0, 0.0};
      int trial_errors = 0;
      for (int j = 0; j < n_slots; ++j) {
        if (j > 0 && step_sigma > 0.0) {
          for (double& c : tx) c += step(rng);
          for (double& c : rx) c += step(rng);
        }
        const double dx = rx[0] - tx[0], dy = rx[1] - tx[1], dz = rx[2] - tx[2];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double h = cir(r);
        const int b = pick(rng);
        const ReceivedVector m = sample_received(b, s.cst, h, s.reception, rng);
        const int decoded =
            dec.genie ? dec.with_h(m, h) : dec.per_slot[j](m);
        if (decoded != b) {
          ++a.slot_errors[j];
          ++trial_errors;
        }
      }
      const double frac = double(trial_errors) / n_slots;
      a.frac_sum += frac;
      a.frac_sq_sum += frac * frac;
    }
  });

  MobileResult out;
  out.curve.resize(n_slots);
  double frac_sum = 0.0, frac_sq_sum = 0.0;
  std::vector<std::uint64_t> slot_errors(n_slots, 0);
  for (const BlockAcc& a : acc) {
    for (int j = 0; j < n_slots; ++j) slot_errors[j] += a.slot_errors[j];
    frac_sum += a.frac_sum;
    frac_sq_sum += a.frac_sq_sum;
  }
  for (int j = 0; j < n_slots; ++j) {
    out.curve[j].t = times[j];
    out.curve[j].est = monte_carlo_estimate(slot_errors[j], trials);
  }
  const double nn = static_cast<double>(trials);
  const double mean = frac_sum / nn;
  const double var =
      trials > 1 ? std::max(0.0, (frac_sq_sum - nn * mean * mean) / (nn - 1.0))
                 : 0.0;
  const double half = 1.959963984540054 * std::sqrt(var / nn);
  out.time_average = {mean,
                      ErrorEstimate::Method::MonteCarlo,
                      half,
                      trials,
                      std::max(0.0, mean - half),
                      std::min(1.0, mean + half)};
  return out;
}

struct BudgetPoint {
  double c = 0.0;
  ErrorEstimate est;  ///< time-averaged error at this budget
};

/// Mobile error rate as a function of the per-bit budget. The constellation
/// is re-instantiated at every budget through `rebuild`.
inline std::vector<BudgetPoint> ber_vs_budget(
    const Scenario& tmpl, const std::vector<double>& budgets,
    const std::function<Constellation(double)>& rebuild, std::uint64_t trials,
    std::uint64_t seed, int threads = 0) {
  for (std::size_t i = 0; i + 1 < budgets.size(); ++i)
    if (!(budgets[i] < budgets[i + 1]))
      throw std::invalid_argument("ber_vs_budget: budgets must ascend");
  std::vector<BudgetPoint> out;
  out.reserve(budgets.size());
  for (double c : budgets) {
    if (!(c > 0)) throw std::invalid_argument("ber_vs_budget: budget <= 0");
    Scenario s = tmpl;
    s.cst = rebuild(c);
    const MobileResult r = monte_carlo_mobile(s, trials, seed, threads);
    out.push_back({c, r.time_average});
  }
  return out;
}

struct ImperfectCsiResult {
  MobileResult with_true_params;
  MobileResult with_wrong_params;
};

/// Run the same mobile scenario twice with the same seed: once with the
/// decoder built from the true channel parameters and once from the wrong
/// ones. The physical channel always uses the true parameters.
inline ImperfectCsiResult imperfect_csi_sweep(const Scenario& s,
                                              const ChannelParams& wrong,
                                              std::uint64_t trials,
                                              std::uint64_t seed,
                                              int threads = 0) {
  if (s.decoder.kind != DecoderKind::MeanCI &&
      s.decoder.kind != DecoderKind::FullCSI &&
      s.decoder.kind != DecoderKind::ChannelFree &&
      s.decoder.kind != DecoderKind::ExpectedLog)
    throw InfeasibleScenario(
        "imperfect_csi_sweep: decoder must consume channel statistics "
        "(mean-ci, full-csi, expected-log) or be channel-free");
  Scenario with_true = s;
  with_true.decoder_channel.reset();
  Scenario with_wrong = s;
  with_wrong.decoder_channel = wrong;
  return {monte_carlo_mobile(with_true, trials, seed, threads),
          monte_carlo_mobile(with_wrong, trials, seed, threads)};
}

}  // namespace molcomm
