#include <catch_amalgamated.hpp>

#include <cmath>

#include "fbmdrift/coefficients.h"
#include "fbmdrift/errors.h"

using namespace fbmdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("expression evaluation", "[expression]") {
  CHECK(Expression::parse("1 + 2 * 3")(0.0) == 7.0);
  CHECK(Expression::parse("(1 + 2) * 3")(0.0) == 9.0);
  CHECK(Expression::parse("8 / 4 / 2")(0.0) == 1.0);
  CHECK(Expression::parse("10 - 4 - 3")(0.0) == 3.0);
  CHECK(Expression::parse("-x")(2.5) == -2.5);
  CHECK(Expression::parse("--x")(2.5) == 2.5);
  CHECK(Expression::parse("2*-x")(1.5) == -3.0);
  CHECK(Expression::parse("1e-3 * x")(1000.0) == 1.0);
  CHECK(Expression::parse("  x*x ")(3.0) == 9.0);
  for (double x : {-3.0, 0.0, 0.7, 12.0}) {
    CHECK(Expression::parse("2*sin(x)+3")(x) == 2 * std::sin(x) + 3);
    CHECK(Expression::parse("exp(-x*x)/(1+cos(x))")(x) == std::exp(-x * x) / (1 + std::cos(x)));
  }
  CHECK(Expression::parse("2*sin(x)+3").text() == "2*sin(x)+3");
}

TEST_CASE("malformed expressions report a position", "[expression]") {
  for (const char* bad : {"", "2*", "sin x", "(1+2", "1+2)", "x y", "tan(x)", "1..2", "y"}) {
    INFO("input '" << bad << "'");
    CHECK_THROWS_AS(Expression::parse(bad), ConfigError);
  }
  CHECK_THROWS_WITH(Expression::parse("2*sin(x)+"), ContainsSubstring("column"));
}

TEST_CASE("builtins and declared constants", "[coefficients]") {
  auto names = CoefficientModel::builtin_names();
  for (const char* n : {"tame", "near_zero", "a_sign_change", "b_sign_change", "unit", "drift_only"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  auto tame = CoefficientModel::builtin("tame");
  CHECK_THAT(tame.K, WithinRel(6 + 2 * std::sqrt(2.0), 1e-15));
  CHECK_THAT(tame.L, WithinRel(2 * std::sqrt(2.0), 1e-15));
  REQUIRE(tame.M.has_value());
  CHECK(*tame.M == 1.0);
  CHECK_FALSE(CoefficientModel::builtin("a_sign_change").M.has_value());
  CHECK_THROWS_AS(CoefficientModel::builtin("nope"), ConfigError);
}

TEST_CASE("validation of the tame model", "[coefficients]") {
  auto r = validate_coefficients(CoefficientModel::builtin("tame"));
  CHECK_THAT(r.M_hat, WithinAbs(1.0, 1e-6));
  CHECK(r.condition_D_ok);
  CHECK_FALSE(r.a_sign_change);
  CHECK_FALSE(r.b_sign_change);
  CHECK(r.within_declared);
  CHECK(r.K_hat <= 6 + 2 * std::sqrt(2.0));
  CHECK_THAT(r.K_hat, WithinRel(6 + 2 * std::sqrt(2.0), 1e-6));
}

TEST_CASE("validation flags sign changes", "[coefficients]") {
  auto a = validate_coefficients(CoefficientModel::builtin("a_sign_change"));
  CHECK(a.a_sign_change);
  CHECK_FALSE(a.b_sign_change);
  CHECK_FALSE(a.condition_D_ok);
  auto b = validate_coefficients(CoefficientModel::builtin("b_sign_change"));
  CHECK(b.b_sign_change);
  CHECK_FALSE(b.condition_D_ok);
  auto near = validate_coefficients(CoefficientModel::builtin("near_zero"));
  CHECK(near.condition_D_ok);
  CHECK_THAT(near.M_hat, WithinAbs(0.1, 1e-6));
}

TEST_CASE("constant coefficients", "[coefficients]") {
  auto r = validate_coefficients(CoefficientModel::parse("1;1"));
  CHECK(r.K_hat == 2.0);
  CHECK(r.L_hat == 0.0);
  CHECK(r.M_hat == 1.0);
  CHECK(r.condition_D_ok);
  auto z = validate_coefficients(CoefficientModel::builtin("drift_only"));
  CHECK_FALSE(z.condition_D_ok);
  CHECK(z.M_hat == 0.0);
}

TEST_CASE("validation never throws on pathological models", "[coefficients]") {
  auto wild = CoefficientModel::from_expressions("exp(x*x)", "1/x");
  ValidationReport r;
  CHECK_NOTHROW(r = validate_coefficients(wild));
  CHECK_FALSE(std::isfinite(r.K_hat));
  CHECK_THROWS_AS(validate_coefficients(wild, Probe{1.0, 0.0, 10}), DomainError);
  CHECK_THROWS_AS(validate_coefficients(wild, Probe{0.0, 1.0, 1}), DomainError);
}

TEST_CASE("model spec round trip", "[coefficients]") {
  for (const auto& name : CoefficientModel::builtin_names()) {
    auto m = CoefficientModel::builtin(name);
    CHECK(m.spec() == "builtin:" + name);
    auto again = CoefficientModel::parse(m.spec());
    CHECK(again.label == m.label);
    CHECK(again.a.text() == m.a.text());
  }
  auto custom = CoefficientModel::parse("x*0.5+2;cos(x)+4");
  CHECK(custom.spec() == "x*0.5+2;cos(x)+4");
  CHECK(custom.a(2.0) == 3.0);
  CHECK_THAT(custom.L, WithinRel(1.5, 1e-6));
  CHECK_THROWS_AS(CoefficientModel::parse("x+1"), ConfigError);
  CHECK_THROWS_AS(CoefficientModel::parse("builtin:"), ConfigError);
}

TEST_CASE("noise-suppressed model divides exactly", "[coefficients]") {
  auto m = CoefficientModel::builtin("noise_suppressed");
  CHECK(m.b(0.0) == std::ldexp(1.0, -1000));
  CHECK(1.0 / m.b(0.0) == std::ldexp(1.0, 1000));
}
