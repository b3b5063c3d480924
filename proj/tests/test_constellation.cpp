#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "molcomm/constellation.hpp"
#include "molcomm/rng.hpp"

using namespace molcomm;

TEST_CASE("rectangular lattice covers the axis product in row-major order") {
  const auto o = rectangular_lattice(1, 2, 800.0);
  REQUIRE(o.m == 2);
  CHECK(o.symbols[0] == std::vector<double>{0.0});
  CHECK(o.symbols[1] == std::vector<double>{800.0});

  const auto q = rectangular_lattice(2, 4, 3.0);
  REQUIRE(q.m == 16);
  REQUIRE(q.k == 2);
  CHECK(q.symbols[0] == std::vector<double>{0.0, 0.0});
  CHECK(q.symbols[1] == std::vector<double>{0.0, 3.0});   // last axis fastest
  CHECK(q.symbols[4] == std::vector<double>{3.0, 0.0});
  CHECK(q.symbols[15] == std::vector<double>{9.0, 9.0});

  const double c = 100.0;
  const auto b = rectangular_lattice(2, 2, 2 * c);
  CHECK(b.symbols == std::vector<std::vector<double>>{
                         {0, 0}, {0, 2 * c}, {2 * c, 0}, {2 * c, 2 * c}});
  CHECK(min_symbol_separation(b) == 2 * c);

  CHECK_THROWS_AS(rectangular_lattice(4, 9, 1.0), std::invalid_argument);  // 6561 > limit
  CHECK_THROWS_AS(rectangular_lattice(2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rectangular_lattice(2, 2, 0.0), std::invalid_argument);
}

TEST_CASE("ratio constellation from pair ratios reproduces the 4-point line") {
  const double c = 300.0;
  std::vector<RatioVector> rv;
  for (double r : {0.0, 0.5, 2.0, std::numeric_limits<double>::infinity()})
    rv.push_back(RatioVector::from_pair_ratio(r));
  const auto cst = maxrsk(c, rv);
  REQUIRE(cst.m == 4);
  CHECK_THAT(cst.symbols[0][0], Catch::Matchers::WithinRel(c, 1e-12));
  CHECK_THAT(cst.symbols[0][1], Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(cst.symbols[1][0], Catch::Matchers::WithinRel(2 * c / 3, 1e-12));
  CHECK_THAT(cst.symbols[1][1], Catch::Matchers::WithinRel(c / 3, 1e-12));
  CHECK_THAT(cst.symbols[2][0], Catch::Matchers::WithinRel(c / 3, 1e-12));
  CHECK_THAT(cst.symbols[2][1], Catch::Matchers::WithinRel(2 * c / 3, 1e-12));
  CHECK_THAT(cst.symbols[3][1], Catch::Matchers::WithinRel(c, 1e-12));

  // adjacent points differ by (c/3, -c/3)
  CHECK_THAT(min_symbol_separation(cst),
             Catch::Matchers::WithinRel(c * std::numbers::sqrt2 / 3.0, 1e-9));
}

TEST_CASE("maxrsk: single symbol, equal sums, duplicate rejection") {
  const auto single = maxrsk(50.0, {RatioVector::of({1.0, 0.0, 0.0})});
  REQUIRE(single.m == 1);
  CHECK(single.symbols[0] == std::vector<double>{50.0, 0.0, 0.0});

  auto rng = substream(2024, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> kd(2, 5), md(2, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = kd(rng), m = md(rng);
    const double c = 1.0 + 999.0 * u(rng);
    std::vector<RatioVector> rs;
    while (static_cast<int>(rs.size()) < m) {
      std::vector<double> raw(k);
      double sum = 0;
      for (auto& x : raw) sum += (x = 0.01 + u(rng));
      for (auto& x : raw) x /= sum;
      rs.push_back(RatioVector::of(raw));
    }
    Constellation cst;
    try {
      cst = maxrsk(c, rs);
    } catch (const std::invalid_argument&) {
      continue;  // rare duplicate draw
    }
    for (int b = 0; b < cst.m; ++b)
      CHECK(std::abs(cst.symbol_sum(b) - c) <= 1e-9 * c);
  }

  const auto r = RatioVector::of({0.25, 0.75});
  CHECK_THROWS_AS(maxrsk(10.0, {r, r}), std::invalid_argument);
}

TEST_CASE("symmetric binary constellation") {
  const auto a = sbrsk(0.0, 400.0);
  CHECK(a.symbols == std::vector<std::vector<double>>{{0, 400}, {400, 0}});
  CHECK(a.tie_rank == std::vector<int>{1, 0});

  const auto b = sbrsk(0.25, 100.0);
  CHECK(b.symbols == std::vector<std::vector<double>>{{25, 75}, {75, 25}});

  for (double rho0 = 0.0; rho0 < 0.46; rho0 += 0.05)
    CHECK(check_channel_free(sbrsk(rho0, 200.0)).ok);

  CHECK_THROWS_AS(sbrsk(0.5, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(sbrsk(-0.1, 100.0), std::invalid_argument);
}

TEST_CASE("three-type symmetric constellation") {
  const auto cst = smaxrsk33(0.4, 1000.0);
  const std::vector<std::vector<double>> want{
      {400, 200, 400}, {200, 400, 400}, {400, 400, 200}};
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 3; ++i)
      CHECK_THAT(cst.symbols[b][i], Catch::Matchers::WithinRel(want[b][i], 1e-12));
  for (int b = 0; b < 3; ++b)
    CHECK_THAT(cst.symbol_sum(b), Catch::Matchers::WithinRel(1000.0, 1e-12));

  for (double p : {0.1, 0.2, 0.4, 0.45})
    CHECK(check_channel_free(smaxrsk33(p, 500.0)).ok);

  CHECK_THROWS_AS(smaxrsk33(1.0 / 3.0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(smaxrsk33(0.0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(smaxrsk33(0.5, 100.0), std::invalid_argument);
}

TEST_CASE("channel-free checker accepts swap structure and rejects the rest") {
  CHECK(check_channel_free(sbrsk(0.2, 400.0)).ok);

  const auto asym = brsk(0.4, 0.8, 400.0);
  const auto w = check_channel_free(asym);
  CHECK_FALSE(w.ok);
  CHECK(w.axis >= 0);  // a ratio-pattern violation, not a sum mismatch
  CHECK(w.b == 0);
  CHECK(w.b_prime == 1);

  // unequal sums fail on the budget condition
  const auto lattice = rectangular_lattice(2, 2, 10.0);
  const auto wl = check_channel_free(lattice);
  CHECK_FALSE(wl.ok);
  CHECK(wl.axis == -1);

  // equal-ratio axes may sit at their own level; only swapped axes must
  // share one value pair
  const auto wide = maxrsk(100.0, {RatioVector::of({0.1, 0.3, 0.2, 0.4}),
                                   RatioVector::of({0.3, 0.1, 0.2, 0.4})});
  CHECK(check_channel_free(wide).ok);

  // three distinct values across the swapped axes break the rule
  const auto broken = maxrsk(100.0, {RatioVector::of({0.1, 0.3, 0.6}),
                                     RatioVector::of({0.3, 0.6, 0.1})});
  CHECK_FALSE(check_channel_free(broken).ok);
}

TEST_CASE("budget normalization reproduces the spacing table exactly") {
  const auto p4 = normalize_budget(2, 4, 1.0);
  CHECK(p4.bits_per_symbol == 2);
  CHECK(p4.spacing_multi_axis == Rational::of(2, 1));
  CHECK(p4.spacing_single_axis == Rational::of(4, 3));
  CHECK(p4.per_symbol_budget == Rational::of(2, 1));

  const auto p16 = normalize_budget(2, 16, 1.0);
  CHECK(p16.bits_per_symbol == 4);
  CHECK(p16.spacing_multi_axis == Rational::of(4, 3));
  CHECK(p16.spacing_single_axis == Rational::of(8, 15));
  CHECK(p16.per_symbol_budget == Rational::of(4, 1));

  const auto p64 = normalize_budget(2, 64, 1.0);
  CHECK(p64.bits_per_symbol == 6);
  CHECK(p64.spacing_multi_axis == Rational::of(6, 7));
  CHECK(p64.spacing_single_axis == Rational::of(4, 21));
  CHECK(p64.per_symbol_budget == Rational::of(6, 1));

  CHECK(p64.spacing_multi_axis.times_c() == "6c/7");
  CHECK(p64.spacing_single_axis.times_c() == "4c/21");
  CHECK_THAT(p16.spacing_single_axis.value(400.0),
             Catch::Matchers::WithinRel(8.0 * 400 / 15, 1e-15));

  CHECK_THROWS_AS(normalize_budget(2, 8, 1.0), std::invalid_argument);   // not M^2
  CHECK_THROWS_AS(normalize_budget(2, 36, 1.0), std::invalid_argument);  // M=6
  CHECK_THROWS_AS(normalize_budget(2, 16, 0.0), std::invalid_argument);
}

TEST_CASE("constellation validation catches malformed designs") {
  Constellation dup;
  dup.k = 2;
  dup.m = 2;
  dup.symbols = {{1.0, 2.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

  Constellation neg;
  neg.k = 1;
  neg.m = 2;
  neg.symbols = {{-1.0}, {2.0}};
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

  Constellation bad_rank = sbrsk(0.1, 10.0);
  bad_rank.tie_rank = {0, 0};
  CHECK_THROWS_AS(bad_rank.validate(), std::invalid_argument);

  CHECK_THROWS_AS(min_symbol_separation(maxrsk(10.0, {RatioVector::of({1.0})})),
                  std::invalid_argument);
}
