#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "molcomm/channel.hpp"
#include "molcomm/numeric.hpp"
#include "molcomm/rng.hpp"

using namespace molcomm;

namespace {

// Independent high-precision evaluation of the passive gain, written as a
// separate expression path in long double.
long double passive_oracle(long double r, const ChannelParams& p) {
  const long double d = (long double)p.d_inf + p.d_tr;
  const long double v =
      4.0L / 3.0L * std::numbers::pi_v<long double> * p.r_rx * p.r_rx * p.r_rx;
  const long double denom =
      std::pow(4.0L * std::numbers::pi_v<long double> * d * p.tau_s, 1.5L);
  return v / denom * std::exp(-r * r / (4.0L * d * p.tau_s));
}

long double absorbing_oracle(long double r, const ChannelParams& p) {
  const long double d = (long double)p.d_inf + p.d_tr;
  return (p.r_rx / r) *
         std::erfc((r - p.r_rx) / (2.0L * std::sqrt(d * (long double)p.t_b)));
}

// Closed-form CDF of the distance law (noncentral chi with 3 degrees of
// freedom, per-coordinate variance 4*d_tr*t) used as the KS oracle.
double distance_cdf(double r, double r0, double d_tr, double t) {
  const double sigma = std::sqrt(4.0 * d_tr * t);
  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  auto phi = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  const double u = (r - r0) / sigma;
  const double v = (r + r0) / sigma;
  return Phi(u) + Phi(v) - 1.0 - (sigma / r0) * (phi(u) - phi(v));
}

}  // namespace

TEST_CASE("passive gain matches the published operating points") {
  const auto p = ChannelParams::defaults();
  CHECK_THAT(passive_cir(1e-6, p),
             Catch::Matchers::WithinRel(0.0281, 0.02));  // quoted low-gain point
  CHECK_THAT(passive_cir(2e-6, p),
             Catch::Matchers::WithinRel((double)passive_oracle(2e-6L, p), 1e-12));
  CHECK_THAT(passive_cir(2e-6, p), Catch::Matchers::WithinRel(3.88e-4, 0.01));
  CHECK(passive_cir(100e-6, p) < 1e-30);
  CHECK(passive_cir(150e-6, p) == 0.0);  // underflows cleanly, no clamp event
  CHECK_THROWS_AS(passive_cir(std::nan(""), p), std::invalid_argument);
  CHECK_THROWS_AS(passive_cir(-1e-6, p), std::invalid_argument);
}

TEST_CASE("absorbing hit probability matches the published operating points") {
  auto p = ChannelParams::defaults();
  CHECK(absorbing_hit_prob(p.r_rx, p) == 1.0);  // erfc(0) = 1, ratio = 1
  auto p_short = p;
  p_short.t_b = 1e-5;
  CHECK_THAT(absorbing_hit_prob(1e-6, p_short),
             Catch::Matchers::WithinRel(0.0369, 0.02));
  CHECK_THAT(absorbing_hit_prob(1e-6, p),
             Catch::Matchers::WithinRel((double)absorbing_oracle(1e-6L, p), 1e-12));
  CHECK_THAT(absorbing_hit_prob(1e-6, p), Catch::Matchers::WithinRel(0.363, 0.01));
  CHECK_THROWS_AS(absorbing_hit_prob(0.4e-6, p), std::invalid_argument);
}

TEST_CASE("both gains decrease strictly with distance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ChannelParams p;
    p.d_inf = std::exp(std::lerp(std::log(1e-10), std::log(1e-8), u(rng)));
    p.d_tr = u(rng) < 0.3 ? 0.0 : 5e-12 * (1 + 9 * u(rng));
    p.r_rx = 0.2e-6 * (1 + 4 * u(rng));
    p.r0 = p.r_rx * (1.5 + 3 * u(rng));
    p.tau_s = 1e-5 * (1 + 9 * u(rng));
    p.t_b = 1e-4 * (1 + 9 * u(rng));
    double prev_p = passive_cir(p.r_rx, p);
    double prev_a = absorbing_hit_prob(p.r_rx, p);
    for (int i = 1; i <= 20; ++i) {
      const double r = p.r_rx + (3e-6 - p.r_rx) * i / 20.0;
      const double hp = passive_cir(r, p);
      const double ha = absorbing_hit_prob(r, p);
      CHECK(hp < prev_p);
      CHECK(ha < prev_a);
      CHECK((hp >= 0 && hp <= 1 && ha >= 0 && ha <= 1));
      prev_p = hp;
      prev_a = ha;
    }
  }
}

TEST_CASE("distance pdf is a unit-mass density") {
  const double r0 = 1e-6, d_tr = 5e-12, t = 1.0;
  const double r_hi = r0 + 12.0 * std::sqrt(4.0 * d_tr * t);
  const double mass =
      integrate([&](double r) { return distance_pdf(r, r0, d_tr, t); }, 0.0, r_hi);
  CHECK_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-6));
  CHECK(distance_pdf(0.0, r0, d_tr, t) == 0.0);
  CHECK_THROWS_AS(distance_pdf(r0, r0, d_tr, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(distance_pdf(r0, r0, 0.0, t), std::invalid_argument);
}

TEST_CASE("distance pdf concentrates at r0 as t -> 0") {
  const double r0 = 1e-6, d_tr = 5e-12, t = 1e-6;
  const double r_hi = r0 + 12.0 * std::sqrt(4.0 * d_tr * t);
  const double mean = integrate(
      [&](double r) { return r * distance_pdf(r, r0, d_tr, t); }, 0.0, r_hi);
  CHECK_THAT(mean, Catch::Matchers::WithinRel(r0, 1e-3));
}

TEST_CASE("distance pdf stays finite where naive sinh overflows") {
  // sinh argument ~ 2.5e4 here; the stable form must not produce inf/nan
  const double f = distance_pdf(1e-6, 1e-6, 5e-12, 1e-8);
  CHECK(std::isfinite(f));
  CHECK(f >= 0.0);
}

TEST_CASE("sampled distances follow the density (KS test)") {
  const double r0 = 1e-6, d_tr = 5e-12, t = 1.0;
  constexpr int n = 1'000'000;
  auto rng = substream(123, 0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_distance(r0, d_tr, t, rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = distance_cdf(xs[i], r0, d_tr, t);
    ks = std::max(ks, std::abs(f - (i + 1.0) / n));
    ks = std::max(ks, std::abs(f - double(i) / n));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("sample_distance edge behavior and determinism") {
  auto rng = substream(9, 1);
  CHECK(sample_distance(1e-6, 5e-12, 0.0, rng) == 1e-6);
  CHECK(sample_distance(1e-6, 0.0, 10.0, rng) == 1e-6);  // static devices
  auto a = substream(42, 7);
  auto b = substream(42, 7);
  for (int i = 0; i < 100; ++i)
    CHECK(sample_distance(1e-6, 5e-12, 0.5, a) ==
          sample_distance(1e-6, 5e-12, 0.5, b));
}

TEST_CASE("mean distance: limit, Monte Carlo cross-check, monotonicity") {
  const double r0 = 1e-6, d_tr = 5e-12;
  CHECK_THAT(mean_distance(r0, d_tr, 1e-12), Catch::Matchers::WithinRel(r0, 1e-9));

  constexpr int n = 1'000'000;
  auto rng = substream(5, 0);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_distance(r0, d_tr, 1.0, rng);
    sum += x;
    sq += x * x;
  }
  const double mc_mean = sum / n;
  const double mc_sd = std::sqrt((sq - n * mc_mean * mc_mean) / (n - 1.0));
  const double closed = mean_distance(r0, d_tr, 1.0);
  CHECK(std::abs(closed - mc_mean) < 3.0 * mc_sd / std::sqrt(double(n)));
  CHECK_THAT(closed, Catch::Matchers::WithinRel(mc_mean, 5e-3));

  double prev = mean_distance(r0, d_tr, 1e-4);
  for (double logt = -3.5; logt <= 2.0; logt += 0.25) {
    const double m = mean_distance(r0, d_tr, std::pow(10.0, logt));
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("mean passive gain: t = 0 limit and Monte Carlo validation") {
  const auto p = ChannelParams::defaults();
  CHECK(mean_passive_cir(0.0, p) == passive_cir(p.r0, p));

  constexpr int n = 400'000;
  auto rng = substream(11, 0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += passive_cir(sample_distance(p.r0, p.d_tr, 1.0, rng), p);
  CHECK_THAT(mean_passive_cir(1.0, p), Catch::Matchers::WithinRel(sum / n, 0.02));

  // For this geometry r0^2 < 6*(d_inf+d_tr)*tau_s, so the mean gain decays
  // from t = 0 onward; checked on a grid.
  double prev = mean_passive_cir(0.0, p);
  for (int i = 1; i <= 40; ++i) {
    const double cur = mean_passive_cir(0.05 * i, p);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("gain distribution: two expectation paths agree") {
  const auto p = ChannelParams::defaults();
  for (double t : {0.1, 1.0, 10.0}) {
    ChannelDistribution dist(t, p, ReceiverType::Passive);
    CHECK_THAT(dist.normalization(), Catch::Matchers::WithinAbs(1.0, 1e-6));
    const double via_quadrature = dist.expect([](double h) { return h; });
    CHECK_THAT(via_quadrature,
               Catch::Matchers::WithinRel(mean_passive_cir(t, p), 0.02));
  }
}

TEST_CASE("gain distribution: samples respect the support") {
  const auto p = ChannelParams::defaults();
  ChannelDistribution dist(1.0, p, ReceiverType::Passive);
  const double h_hi = dist.h_max();
  CHECK(h_hi == passive_cir(0.0, p));
  auto rng = substream(3, 2);
  for (int i = 0; i < 20000; ++i) {
    const double h = dist.sample(rng);
    CHECK(h >= 0.0);
    CHECK(h <= h_hi);
  }

  ChannelDistribution abs_dist(1.0, p, ReceiverType::Absorbing);
  CHECK(abs_dist.h_max() == 1.0);
  CHECK_THAT(abs_dist.normalization(), Catch::Matchers::WithinAbs(1.0, 1e-6));
  for (int i = 0; i < 20000; ++i) {
    const double h = abs_dist.sample(rng);
    CHECK((h >= 0.0 && h <= 1.0));
  }
}

TEST_CASE("gain distribution degenerates to a point mass") {
  const auto p = ChannelParams::defaults();
  ChannelDistribution dist(0.0, p, ReceiverType::Passive);
  CHECK(dist.point_mass());
  CHECK(dist.expect([](double h) { return h; }) == passive_cir(p.r0, p));
  CHECK_THROWS_AS(channel_distribution(0.0, p, ReceiverType::Passive),
                  std::invalid_argument);
}

TEST_CASE("parameter validation names the offending field") {
  auto p = ChannelParams::defaults();
  p.r0 = p.r_rx / 2;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("r0"));
  p = ChannelParams::defaults();
  p.d_inf = 0;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("d_inf"));
  p = ChannelParams::defaults();
  p.tau_s = -1;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("tau_s"));
}
