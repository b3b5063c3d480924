#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "molcomm/scenario.hpp"

using namespace molcomm;

namespace {

const char* kSample = R"(# sample scenario
[channel]
receiver = absorbing
mobile = true
d_inf = 5e-9 m2/s
d_tr = 5e-11 m2/s
r_rx = 0.45 um
r0 = 1 um
tau_s = 0.035 ms
t_b = 0.05 s

[constellation]
type = sbrsk
c = 2e6
rho0 = 0.1

[reception]
lambda = 80
model = poisson

[decoder]
kind = channel-free
genie = false

[run]
mode = mobile
bits = 50
trials = 1000
seed = 9
slot = t_b
schemes = sbrsk, ook-full-csi, ook-mean-ci
lambda_sweep = 10:90:9

[imperfect]
d_inf = 9e-8 m2/s
)";

}  // namespace

TEST_CASE("quantities parse with SI suffixes") {
  using detail::parse_quantity;
  CHECK(parse_quantity("1um", 1) == 1e-6);
  CHECK(parse_quantity("0.45 um", 1) == 0.45e-6);
  CHECK(parse_quantity("0.5ms", 1) == 0.5e-3);
  CHECK(parse_quantity("5e-9m2/s", 1) == 5e-9);
  CHECK(parse_quantity("5e-9 m2/s", 1) == 5e-9);
  CHECK(parse_quantity("12 um2/s", 1) == 12e-12);
  CHECK(parse_quantity("400", 1) == 400.0);
  CHECK(parse_quantity("3nm", 1) == 3e-9);
  CHECK(std::isinf(parse_quantity("inf", 1)));
  CHECK_THROWS_WITH(parse_quantity("4 parsec", 7),
                    Catch::Matchers::ContainsSubstring("line 7"));
  CHECK_THROWS_AS(parse_quantity("donkey", 1), ParseError);
}

TEST_CASE("grids and lists parse") {
  using detail::parse_list;
  const auto grid = parse_list("10:90:9", 1);
  REQUIRE(grid.size() == 9);
  CHECK(grid.front() == 10.0);
  CHECK(grid.back() == 90.0);
  CHECK(grid[1] == 20.0);
  const auto list = parse_list("5e4, 1e5, 2e5", 1);
  REQUIRE(list.size() == 3);
  CHECK(list[2] == 2e5);
  CHECK(parse_list("7", 1) == std::vector<double>{7.0});
}

TEST_CASE("full scenario file round-trips through the serializer") {
  const auto cfg = ScenarioConfig::parse(kSample);
  CHECK(cfg.receiver == ReceiverType::Absorbing);
  CHECK(cfg.mobile);
  CHECK(cfg.channel.d_tr == 5e-11);
  CHECK(cfg.channel.t_b == 0.05);
  CHECK(cfg.c == 2e6);
  CHECK(cfg.rho0 == 0.1);
  CHECK(cfg.lambda == 80.0);
  CHECK(cfg.decoder == DecoderKind::ChannelFree);
  CHECK(cfg.mode == "mobile");
  CHECK(cfg.trials == 1000);
  CHECK(cfg.seed == 9);
  CHECK(cfg.seed_explicit);
  REQUIRE(cfg.schemes.size() == 3);
  CHECK(cfg.schemes[1] == "ook-full-csi");
  CHECK(cfg.lambda_sweep.size() == 9);
  REQUIRE(cfg.wrong_d_inf.has_value());
  CHECK(*cfg.wrong_d_inf == 9e-8);

  // serialize -> parse -> serialize is a fixpoint
  const std::string canon = cfg.serialize();
  const auto cfg2 = ScenarioConfig::parse(canon);
  CHECK(cfg2.serialize() == canon);
}

TEST_CASE("explicit symbols block") {
  const char* text = R"(
[constellation]
type = explicit
symbols:
  0 400
  400 0
)";
  const auto cfg = ScenarioConfig::parse(text);
  const auto cst = cfg.build_constellation();
  CHECK(cst.k == 2);
  CHECK(cst.m == 2);
  CHECK(cst.symbols[1][0] == 400.0);

  const char* bad = R"(
[constellation]
type = explicit
symbols:
  0 400
  400
)";
  CHECK_THROWS_WITH(ScenarioConfig::parse(bad),
                    Catch::Matchers::ContainsSubstring("line 6"));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH(ScenarioConfig::parse("[channel]\nbogus = 3\n"),
                    Catch::Matchers::ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(ScenarioConfig::parse("[nope]\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(ScenarioConfig::parse("x = 1\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(ScenarioConfig::parse("[run]\nmode static\n"),
                    Catch::Matchers::ContainsSubstring("key = value"));
}

TEST_CASE("constellation factories honor the configured type") {
  ScenarioConfig cfg;
  cfg.cst_type = "smaxrsk33";
  cfg.p33 = 0.4;
  cfg.c = 900.0;
  CHECK(cfg.build_constellation().m == 3);

  cfg.cst_type = "ook";
  cfg.n_a = 0.0;
  cfg.c = 400.0;
  const auto o = cfg.build_constellation();
  CHECK(o.symbols[1][0] == 800.0);  // n_a defaults to 2c

  cfg.cst_type = "maxrsk";
  cfg.pair_ratios = {0.0, 0.5, 2.0, std::numeric_limits<double>::infinity()};
  CHECK(cfg.build_constellation().m == 4);

  cfg.cst_type = "martian";
  CHECK_THROWS_AS(cfg.build_constellation(), std::invalid_argument);
}

TEST_CASE("schemes materialize the right pairings") {
  ScenarioConfig cfg;
  cfg.c = 2e5;
  cfg.rho0 = 0.0;
  cfg.lambda = 90.0;
  cfg.mobile = true;
  cfg.wrong_d_inf = 9e-8;

  const auto rsk = cfg.scheme_scenario("sbrsk");
  CHECK(rsk.decoder.kind == DecoderKind::ChannelFree);
  CHECK(rsk.cst.m == 2);
  CHECK_FALSE(rsk.decoder_channel.has_value());

  const auto full = cfg.scheme_scenario("ook-full-csi");
  CHECK(full.decoder.kind == DecoderKind::FullCSI);
  CHECK(full.cst.symbols[1][0] == 4e5);

  const auto imp = cfg.scheme_scenario("ook-imperfect-dinf");
  REQUIRE(imp.decoder_channel.has_value());
  CHECK(imp.decoder_channel->d_inf == 9e-8);
  CHECK(imp.decoder_channel->d_tr == cfg.channel.d_tr);

  const auto genie = cfg.scheme_scenario("ook-known-h");
  CHECK(genie.decoder.kind == DecoderKind::OokThreshold);
  CHECK(genie.decoder.genie);  // mobile scenario needs the oracle

  CHECK_THROWS_AS(cfg.scheme_scenario("quantum"), std::invalid_argument);
}
