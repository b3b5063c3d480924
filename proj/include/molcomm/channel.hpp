#pragma once
// Diffusive-channel models: hit probabilities for passive and absorbing
// receiver ports, transceiver mobility, and the induced distribution of the
// time-varying channel gain h.
//
// Units are SI throughout (m, s, m^2/s); h values are probabilities.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "molcomm/numeric.hpp"
#include "molcomm/rng.hpp"

namespace molcomm {

enum class ReceiverType { Passive, Absorbing };

inline const char* to_string(ReceiverType t) {
  return t == ReceiverType::Passive ? "passive" : "absorbing";
}

namespace diag {
/// Count of CIR evaluations clamped into [0,1]. Stays zero for physical
/// parameter sets; anything else flags a suspicious configuration.
inline std::atomic<std::uint64_t> cir_clamp_events{0};
}  // namespace diag

struct ChannelParams {
  double d_inf;  ///< diffusion coefficient of signaling molecules [m^2/s]
  double d_tr;   ///< common TX/RX diffusion coefficient [m^2/s]; 0 = static
  double r_rx;   ///< receiver-port radius [m]
  double r0;     ///< initial TX-RX distance [m]
  double tau_s;  ///< sampling offset after release [s]
  double t_b;    ///< bit duration [s]

  double rx_volume() const {
    return (4.0 / 3.0) * std::numbers::pi * r_rx * r_rx * r_rx;
  }

  void validate() const {
    auto bad = [](const char* field) {
      throw std::invalid_argument(std::string("ChannelParams: invalid ") +
                                  field);
    };
    if (!(d_inf > 0) || !std::isfinite(d_inf)) bad("d_inf");
    if (!(d_tr >= 0) || !std::isfinite(d_tr)) bad("d_tr");
    if (!(r_rx > 0) || !std::isfinite(r_rx)) bad("r_rx");
    if (!(r0 > r_rx) || !std::isfinite(r0)) bad("r0 (must exceed r_rx)");
    if (!(tau_s > 0) || !std::isfinite(tau_s)) bad("tau_s");
    if (!(t_b > 0) || !std::isfinite(t_b)) bad("t_b");
  }

  /// Stock parameter set used by the bundled scenarios: r0 = 1 um,
  /// r_rx = 0.45 um, d_inf = 5e-9, d_tr = 5e-12, t_b = 0.5 ms,
  /// tau_s = 0.035 ms.
  static ChannelParams defaults() {
    return ChannelParams{5e-9, 5e-12, 0.45e-6, 1e-6, 0.035e-3, 0.5e-3};
  }
};

namespace detail {
inline double clamp_cir(double h) {
  if (h < 0.0 || h > 1.0) {
    diag::cir_clamp_events.fetch_add(1, std::memory_order_relaxed);
    h = std::clamp(h, 0.0, 1.0);
  }
  return h;
}
}  // namespace detail

/// Probability that a molecule released at distance r is observed inside a
/// passive receiver tau_s after release.
inline double passive_cir(double r, const ChannelParams& p) {
  if (!std::isfinite(r) || r < 0)
    throw std::invalid_argument("passive_cir: r must be finite and >= 0");
  const double d = p.d_inf + p.d_tr;
  const double four_dt = 4.0 * d * p.tau_s;
  const double h = p.rx_volume() /
                   std::pow(std::numbers::pi * four_dt, 1.5) *
                   std::exp(-r * r / four_dt);
  return detail::clamp_cir(h);
}

/// Probability that a molecule released at distance r is absorbed by a fully
/// absorbing receiver within one bit duration.
inline double absorbing_hit_prob(double r, const ChannelParams& p) {
  if (!std::isfinite(r))
    throw std::invalid_argument("absorbing_hit_prob: r must be finite");
  if (r < p.r_rx)
    throw std::invalid_argument(
        "absorbing_hit_prob: r < r_rx (TX inside absorbing boundary)");
  const double d = p.d_inf + p.d_tr;
  const double h =
      (p.r_rx / r) * std::erfc((r - p.r_rx) / (2.0 * std::sqrt(d * p.t_b)));
  return detail::clamp_cir(h);
}

/// Density of the TX-RX distance at time t when both devices diffuse with
/// coefficient d_tr. The sinh*exp product is evaluated as a difference of
/// exponentials with non-positive arguments so it cannot overflow.
inline double distance_pdf(double r, double r0, double d_tr, double t) {
  if (!(t > 0) || !(d_tr > 0))
    throw std::invalid_argument(
        "distance_pdf: static channel has no distance distribution");
  if (!std::isfinite(r) || r < 0)
    throw std::invalid_argument("distance_pdf: r must be finite and >= 0");
  if (r == 0.0) return 0.0;
  const double a = r0 * r / (4.0 * d_tr * t);
  const double b = (r * r + r0 * r0) / (8.0 * d_tr * t);
  const double pref = r / (r0 * std::sqrt(2.0 * std::numbers::pi * d_tr * t));
  return pref * 0.5 * (std::exp(a - b) - std::exp(-a - b));
}

/// Draw one TX-RX distance at time t: six independent Gaussian coordinates
/// (three per device, variance 2*d_tr*t, TX initially at the origin and RX
/// at (r0,0,0)), then the Euclidean norm of the difference.
inline double sample_distance(double r0, double d_tr, double t,
                              std::mt19937_64& rng) {
  if (!(t >= 0)) throw std::invalid_argument("sample_distance: t < 0");
  if (t == 0.0 || d_tr == 0.0) return r0;
  const double sigma = std::sqrt(2.0 * d_tr * t);
  std::normal_distribution<double> gauss(0.0, sigma);
  double tx[3], rx[3];
  for (double& c : tx) c = gauss(rng);
  for (double& c : rx) c = gauss(rng);
  rx[0] += r0;
  const double dx = rx[0] - tx[0];
  const double dy = rx[1] - tx[1];
  const double dz = rx[2] - tx[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Mean TX-RX distance at time t under the mobility model.
inline double mean_distance(double r0, double d_tr, double t) {
  if (!(t >= 0)) throw std::invalid_argument("mean_distance: t < 0");
  if (t == 0.0 || d_tr == 0.0) return r0;
  const double s8 = 8.0 * d_tr * t;
  return std::sqrt(s8 / std::numbers::pi) * std::exp(-r0 * r0 / s8) +
         (r0 + 4.0 * d_tr * t / r0) * std::erf(r0 / std::sqrt(s8));
}

/// Mean passive-receiver gain at time t. Closed form of the expectation of
/// passive_cir over the distance law: the tau_s diffusion scale D1 = d_inf +
/// d_tr combines with the mobility scale D2 = 2*d_tr, so the t = 0 limit
/// equals passive_cir(r0, .).
inline double mean_passive_cir(double t, const ChannelParams& p) {
  if (!(t >= 0)) throw std::invalid_argument("mean_passive_cir: t < 0");
  const double d1 = p.d_inf + p.d_tr;
  const double d2 = 2.0 * p.d_tr;
  const double u = d1 * p.tau_s + d2 * t;
  const double h = p.rx_volume() /
                   std::pow(4.0 * std::numbers::pi * u, 1.5) *
                   std::exp(-p.r0 * p.r0 / (4.0 * u));
  return detail::clamp_cir(h);
}

/// Plug-in mean gain for an absorbing receiver: the absorption law evaluated
/// at the mean distance (the exact mean has no closed form).
inline double mean_absorbing_cir_approx(double t, const ChannelParams& p) {
  const double r = std::max(mean_distance(p.r0, p.d_tr, t), p.r_rx);
  return absorbing_hit_prob(r, p);
}

/// Distribution of the channel gain h at a fixed time t, realized as the
/// pushforward of the distance law through the CIR map. Supports sampling
/// and expectation queries; expectations integrate over the distance PDF
/// with adaptive quadrature (relative tolerance 1e-6).
///
/// For the absorbing receiver the map is extended with h = 1 for r <= r_rx
/// (contact means certain absorption), which keeps mobile trajectories that
/// wander inside the contact radius well defined.
class ChannelDistribution {
 public:
  ChannelDistribution(double t, const ChannelParams& params, ReceiverType type)
      : t_(t), params_(params), type_(type) {
    params_.validate();
    if (!(t >= 0)) throw std::invalid_argument("ChannelDistribution: t < 0");
    point_mass_ = (t == 0.0 || params_.d_tr == 0.0);
    r_max_ = params_.r0 + 12.0 * std::sqrt(4.0 * params_.d_tr * t_);
  }

  double time() const { return t_; }
  ReceiverType receiver() const { return type_; }
  bool point_mass() const { return point_mass_; }
  const ChannelParams& params() const { return params_; }

  /// CIR as a function of distance, with the absorbing contact extension.
  double cir(double r) const {
    if (type_ == ReceiverType::Passive) return passive_cir(r, params_);
    if (r <= params_.r_rx) return 1.0;
    return absorbing_hit_prob(r, params_);
  }

  /// Supremum of the support of h.
  double h_max() const {
    return type_ == ReceiverType::Passive ? passive_cir(0.0, params_) : 1.0;
  }

  double sample(std::mt19937_64& rng) const {
    return cir(sample_distance(params_.r0, params_.d_tr, t_, rng));
  }

  /// E[g(h)] by quadrature over the distance PDF, integrated in panels
  /// anchored at the distance law's bulk so the adaptive scheme cannot skip
  /// over it.
  template <typename G>
  double expect(G&& g) const {
    if (point_mass_) return g(cir(params_.r0));
    auto f = [&](double r) {
      return g(cir(r)) * distance_pdf(r, params_.r0, params_.d_tr, t_);
    };
    return integrate_panels(f, base_breakpoints());
  }

  /// log E[exp(lg(h))] for a log-space integrand lg. The integrand is
  /// rescaled by its maximum (grid scan plus golden-section refinement) and
  /// the quadrature panels are split at the located peak: likelihood spikes
  /// can be orders of magnitude narrower than the distance spread, and an
  /// un-anchored adaptive pass can miss them entirely. Returns -inf when
  /// the expectation underflows to zero.
  template <typename LG>
  double log_expect(LG&& lg) const {
    if (point_mass_) return lg(cir(params_.r0));
    constexpr int kGrid = 256;
    const double step = r_max_ / kGrid;
    auto lg_at = [&](double r) { return lg(cir(r)); };
    double peak = kNegInf;
    int peak_idx = 0;
    for (int i = 0; i <= kGrid; ++i) {
      const double v = lg_at(i * step);
      if (v > peak) {
        peak = v;
        peak_idx = i;
      }
    }
    if (!std::isfinite(peak)) return kNegInf;

    // refine the peak within its grid neighborhood
    double a = std::max(0.0, (peak_idx - 1) * step);
    double b = std::min(r_max_, (peak_idx + 1) * step);
    constexpr double kGolden = 0.61803398874989484;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = lg_at(x1), f2 = lg_at(x2);
    for (int it = 0; it < 90 && b - a > 1e-14 * r_max_; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = lg_at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = lg_at(x1);
      }
    }
    const double r_peak = 0.5 * (a + b);
    peak = std::max(peak, std::max(f1, f2));

    // local width from the curvature at the peak, clamped to sane panel sizes
    const double delta = std::max(1e-9 * r_max_, 1e-4 * step);
    const double d2 = (lg_at(r_peak + delta) - 2.0 * lg_at(r_peak) +
                       lg_at(std::max(0.0, r_peak - delta))) /
                      (delta * delta);
    double width = d2 < 0 ? 1.0 / std::sqrt(-d2) : step;
    width = std::clamp(width, 1e-12 * r_max_, step);

    auto pts = base_breakpoints();
    for (double w : {-8.0 * step, -8.0 * width, -width, 0.0, width,
                     8.0 * width, 8.0 * step})
      pts.push_back(r_peak + w);
    finalize_breakpoints(pts);

    auto f = [&](double r) {
      const double v = lg_at(r);
      if (!std::isfinite(v)) return 0.0;
      return std::exp(std::min(v - peak, 700.0)) *
             distance_pdf(r, params_.r0, params_.d_tr, t_);
    };
    const double shifted = integrate_panels(f, pts);
    if (shifted <= 0.0) return kNegInf;
    return peak + std::log(shifted);
  }

  /// E[1]; equals 1 up to quadrature tolerance, exposed for diagnostics.
  double normalization() const {
    return expect([](double) { return 1.0; });
  }

 private:
  // Panel edges shared by every expectation: domain ends, the absorbing
  // contact radius, and the bulk of the distance law at r0 +- k sigma.
  std::vector<double> base_breakpoints() const {
    std::vector<double> pts{0.0, r_max_};
    if (type_ == ReceiverType::Absorbing) pts.push_back(params_.r_rx);
    const double sd = std::sqrt(4.0 * params_.d_tr * t_);
    for (double k : {-10.0, -4.0, -1.0, 1.0, 4.0, 10.0})
      pts.push_back(params_.r0 + k * sd);
    return pts;
  }

  void finalize_breakpoints(std::vector<double>& pts) const {
    for (double& p : pts) p = std::clamp(p, 0.0, r_max_);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](double x, double y) {
                            return y - x < 1e-12 * r_max_;
                          }),
              pts.end());
  }

  /// Panel-wise integration. A cheap fixed-order pass sizes each panel's
  /// contribution first; only panels that actually carry mass go through
  /// the strict adaptive integration with its convergence guarantee, so a
  /// negligible sliver cannot fail the whole expectation.
  template <typename F>
  double integrate_panels(F&& f, std::vector<double> pts) const {
    finalize_breakpoints(pts);
    const std::size_t n = pts.empty() ? 0 : pts.size() - 1;
    std::vector<double> rough(n, 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rough[i] = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, pts[i], pts[i + 1], 0);
      scale += std::abs(rough[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(rough[i]) >= 1e-9 * scale)
        acc += integrate(f, pts[i], pts[i + 1]);
      else
        acc += rough[i];
    }
    return acc;
  }

  double t_;
  ChannelParams params_;
  ReceiverType type_;
  bool point_mass_;
  double r_max_;
};

inline ChannelDistribution channel_distribution(double t,
                                                const ChannelParams& params,
                                                ReceiverType type) {
  if (!(t > 0) && params.d_tr > 0)
    throw std::invalid_argument("channel_distribution: t must be > 0");
  return ChannelDistribution(t, params, type);
}

}  // namespace molcomm
