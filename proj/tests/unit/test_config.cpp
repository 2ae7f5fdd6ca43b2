#include <catch_amalgamated.hpp>

#include "fbmdrift/config.h"
#include "fbmdrift/errors.h"

using namespace fbmdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::string key_of(auto&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("key-value grammar", "[config]") {
  auto kv = parse_key_values(R"(
# comment
; another comment
theta = 2.0
hurst = [0.6, 0.7]
name = "quoted value; with = signs"

[coeff]
a = "2*sin(x)+3"
label = tame
)");
  CHECK(kv.size() == 5);
  CHECK(kv.at("theta") == "2.0");
  CHECK(kv.at("hurst") == "[0.6, 0.7]");
  CHECK(kv.at("name") == "quoted value; with = signs");
  CHECK(kv.at("coeff.a") == "2*sin(x)+3");
  CHECK(kv.at("coeff.label") == "tame");
}

TEST_CASE("grammar errors carry the line number", "[config]") {
  CHECK_THROWS_WITH(parse_key_values("a = 1\na = 2\n"), ContainsSubstring("line 2") && ContainsSubstring("duplicate"));
  CHECK_THROWS_WITH(parse_key_values("a = 1\n\njust words\n"), ContainsSubstring("line 3"));
  CHECK_THROWS_AS(parse_key_values("[open\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("a = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("a =\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("bad key = 1\n"), ConfigError);
}

TEST_CASE("value parsers", "[config]") {
  KeyValues kv{{"x", "2.5"}, {"l", "[1, 2 , 3]"}, {"s", "7"}, {"bad", "abc"}, {"f", "1.5"}};
  CHECK(parse_real(kv, "x") == 2.5);
  CHECK(parse_integer_list(kv, "l") == std::vector<long long>{1, 2, 3});
  CHECK(parse_real_list(kv, "s") == std::vector<double>{7.0});
  CHECK_THROWS_AS(parse_real(kv, "bad"), ConfigError);
  CHECK_THROWS_AS(parse_integer(kv, "f"), ConfigError);
  CHECK_THROWS_AS(parse_real(kv, "missing"), ConfigError);
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real_list({0.5, 2.0}) == "[0.5, 2]");
}

TEST_CASE("empty experiment config lists every missing key", "[config]") {
  CHECK_THROWS_WITH(resolve_experiment({}), ContainsSubstring("missing required keys: theta, coeff, hurst, n"));
}

TEST_CASE("derived lambda for the weighted estimator", "[config]") {
  KeyValues kv{{"theta", "2"}, {"coeff", "builtin:tame"}, {"hurst", "[0.6]"}, {"n", "[3]"}, {"estimator", "weighted"}};
  auto r = resolve_experiment(kv);
  REQUIRE(r.derived.contains("lambda"));
  auto lambdas = parse_real_list(r.derived, "lambda");
  REQUIRE(lambdas.size() == 1);
  CHECK_THAT(lambdas[0], WithinAbs(-0.1, 1e-15));
  CHECK(r.config.estimators == std::vector<EstimatorKind>{EstimatorKind::weighted});

  kv["estimator"] = "simple";
  CHECK_FALSE(resolve_experiment(kv).derived.contains("lambda"));
}

TEST_CASE("reference config parses to the expected experiment", "[config]") {
  auto r = resolve_experiment(read_key_values(FBMDRIFT_CONFIG_DIR "/table1.cfg"));
  const auto& c = r.config;
  CHECK(c.theta == 2.0);
  CHECK(c.model.a.text() == "2*sin(x)+3");
  CHECK(c.model.b.text() == "2*cos(x)+3");
  CHECK(c.model.label == "tame");
  REQUIRE(c.hurst_list.size() == 4);
  CHECK(c.hurst_list[0].value() == 0.6);
  CHECK(c.hurst_list[3].value() == 0.9);
  CHECK(c.n_list == std::vector<int>{3, 4, 5, 6});
  CHECK(c.replicates == 20);
  CHECK(c.refinement == 8);
  CHECK(c.base_seed == 42);
  CHECK(c.x0 == 0.0);
  CHECK(c.clock == DriverClock::unit_interval);
  CHECK(c.estimators.size() == 2);
  CHECK(r.canonical.at("coeff") == "builtin:tame");

  // Canonical form is a fixed point.
  auto again = resolve_experiment(parse_key_values(format_key_values(r.canonical)));
  CHECK(again.canonical == r.canonical);
}

TEST_CASE("every shipped config resolves", "[config]") {
  for (const char* name : {"table1.cfg", "table2.cfg", "pathology_a.cfg", "pathology_b.cfg"}) {
    INFO(name);
    CHECK_NOTHROW(resolve_experiment(read_key_values(std::string(FBMDRIFT_CONFIG_DIR) + "/" + name)));
  }
}

TEST_CASE("invalid experiment configs name the key", "[config]") {
  KeyValues base{{"theta", "2"}, {"coeff", "builtin:tame"}, {"hurst", "[0.7]"}, {"n", "[3]"}};
  auto with = [&](std::string k, std::string v) {
    auto kv = base;
    kv[k] = v;
    return kv;
  };
  CHECK(key_of([&] { resolve_experiment(with("colour", "red")); }) == "colour");
  CHECK(key_of([&] { resolve_experiment(with("hurst", "[0.4]")); }) == "hurst");
  CHECK(key_of([&] { resolve_experiment(with("hurst", "[0.7, 1.0]")); }) == "hurst");
  CHECK(key_of([&] { resolve_experiment(with("n", "[0]")); }) == "n");
  CHECK(key_of([&] { resolve_experiment(with("replicates", "0")); }) == "replicates");
  CHECK(key_of([&] { resolve_experiment(with("estimator", "fancy")); }) == "estimator");
  CHECK(key_of([&] { resolve_experiment(with("driver_clock", "wall")); }) == "driver_clock");
  CHECK(key_of([&] { resolve_experiment(with("theta", "0")); }) == "theta");
  CHECK(key_of([&] { resolve_experiment(with("theta", "two")); }) == "theta");

  KeyValues expr{{"theta", "2"}, {"coeff.a", "2*sin(x"}, {"coeff.b", "1"}, {"hurst", "0.7"}, {"n", "3"}};
  CHECK_THROWS_AS(resolve_experiment(expr), ConfigError);
  CHECK(key_of([&] { resolve_experiment(expr); }) == "coeff.a/coeff.b");
  expr.erase("coeff.b");
  CHECK(key_of([&] { resolve_experiment(expr); }) == "coeff.b");
}
