#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fbmdrift/errors.h"
#include "fbmdrift/estimators.h"
#include "fbmdrift/experiment.h"
#include "fbmdrift/sde.h"

using namespace fbmdrift;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

SimulationSpec make_spec(double theta, int n, std::uint64_t seed, int refinement = 8,
                         DriverClock clock = DriverClock::horizon) {
  SimulationSpec s;
  s.theta = theta;
  s.obs_n = n;
  s.seed = seed;
  s.refinement = refinement;
  s.clock = clock;
  s.hurst = HurstParam(0.7);
  return s;
}

}  // namespace

TEST_CASE("observation grid", "[sde]") {
  ObservationGrid g(3);
  CHECK(g.intervals() == 64);
  CHECK(g.points() == 65);
  CHECK(g.step() == 0.125);
  CHECK(g.horizon() == 8.0);
  CHECK(g.time(64) == 8.0);
  CHECK(ObservationGrid::from_points(257).n() == 4);
  CHECK_THROWS_AS(ObservationGrid::from_points(100), AlignmentError);
  CHECK_THROWS_AS(ObservationGrid(0), DomainError);
  CHECK_THROWS_AS(ObservationGrid(13), DomainError);
  CHECK_THROWS_AS(ObservationSeries(g, std::vector<double>(64)), DomainError);
}

TEST_CASE("driver clock names", "[sde]") {
  CHECK(parse_driver_clock("horizon") == DriverClock::horizon);
  CHECK(parse_driver_clock("unit") == DriverClock::unit_interval);
  CHECK(to_string(DriverClock::unit_interval) == "unit");
  CHECK_THROWS_AS(parse_driver_clock("wall"), ConfigError);
}

TEST_CASE("noise-free dynamics are exact", "[sde]") {
  // b = 0, a = 1: X_t = theta t. Power-of-two steps make every Euler step exact.
  auto model = CoefficientModel::builtin("drift_only");
  auto path = simulate_sde(make_spec(2.0, 3, 1), model);
  for (std::size_t j = 0; j < path.values.size(); ++j) CHECK(path.values[j] == 2.0 * path.fine_grid.time(j));
  // Non-dyadic refinement: rounding only.
  auto p3 = simulate_sde(make_spec(2.0, 3, 1, 3), model);
  for (std::size_t j = 0; j < p3.values.size(); ++j)
    CHECK(std::abs(p3.values[j] - 2.0 * p3.fine_grid.time(j)) <= 1e-12 * std::max(1.0, p3.values[j]));
}

TEST_CASE("theta = 0 with unit diffusion reproduces the driver", "[sde]") {
  auto model = CoefficientModel::builtin("unit");
  for (auto clock : {DriverClock::horizon, DriverClock::unit_interval}) {
    auto spec = make_spec(0.0, 3, 9, 8, clock);
    auto path = simulate_sde(spec, model);
    CHECK(path.values == driving_fbm(spec));
  }
}

TEST_CASE("driver clocks differ by self-similar scaling", "[sde]") {
  // Unit clock: B(t / 2^n) on the same number of increments. The two clocks
  // use identical normals, so the paths differ by exactly 2^{-nH} up to rounding.
  auto h = make_spec(0.0, 3, 5, 8, DriverClock::horizon);
  auto u = make_spec(0.0, 3, 5, 8, DriverClock::unit_interval);
  auto bh = driving_fbm(h), bu = driving_fbm(u);
  double scale = std::pow(2.0, -3 * 0.7);
  for (std::size_t j = 1; j < bh.size(); j += 97) CHECK_THAT(bu[j], WithinRel(scale * bh[j], 1e-9));
}

TEST_CASE("downsampling", "[sde]") {
  auto model = CoefficientModel::builtin("tame");
  auto path = simulate_sde(make_spec(2.0, 3, 2), model);
  auto obs = downsample(path, ObservationGrid(3));
  REQUIRE(obs.values.size() == 65);
  for (std::size_t k = 0; k < 65; ++k) CHECK(obs.values[k] == path.values[8 * k]);

  auto exact = simulate_sde(make_spec(2.0, 2, 2, 1), model);
  CHECK(downsample(exact, ObservationGrid(2)).values == exact.values);
  CHECK_THROWS_AS(downsample(path, ObservationGrid(2)), AlignmentError);
  CHECK_THROWS_AS(downsample(path, ObservationGrid(4)), AlignmentError);
}

TEST_CASE("simulation is deterministic", "[sde]") {
  auto model = CoefficientModel::builtin("tame");
  auto a = simulate_sde(make_spec(2.0, 3, 12), model);
  auto b = simulate_sde(make_spec(2.0, 3, 12), model);
  auto c = simulate_sde(make_spec(2.0, 3, 13), model);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values[0] == 0.0);
}

TEST_CASE("Euler blow-up is reported with its step", "[sde]") {
  auto model = CoefficientModel::from_expressions("exp(x)*exp(x)", "1");
  auto spec = make_spec(50.0, 2, 1);
  CHECK_THROWS_MATCHES(simulate_sde(spec, model), NumericalError, Catch::Matchers::MessageMatches(ContainsSubstring("step")));
  auto short_memory = make_spec(2.0, 2, 1);
  short_memory.hurst = HurstParam(0.4);
  CHECK_THROWS_AS(simulate_sde(short_memory, CoefficientModel::builtin("tame")), DomainError);
}

TEST_CASE("refinement self-convergence", "[sde]") {
  // Couple refinements 16 and 8 through one driver and compare the induced
  // change of the estimate with a tenth of the typical error at n = 4.
  const auto model = CoefficientModel::builtin("tame");
  const HurstParam H(0.7);
  std::vector<double> change;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto spec = make_spec(2.0, 4, s, 16, DriverClock::unit_interval);
    auto fine = driving_fbm(spec);
    std::vector<double> coarse;
    for (std::size_t j = 0; j < fine.size(); j += 2) coarse.push_back(fine[j]);
    auto p16 = simulate_sde_with_driver(2.0, model, 0.0, H, simulation_grid(4, 16), fine);
    auto p8 = simulate_sde_with_driver(2.0, model, 0.0, H, simulation_grid(4, 8), coarse);
    ObservationGrid g(4);
    double e16 = estimate_theta2(downsample(p16, g), model).value;
    double e8 = estimate_theta2(downsample(p8, g), model).value;
    change.push_back(std::abs(e16 - e8) / 2.0);
  }
  INFO("median change " << median(change));
  CHECK(median(change) < 0.1 * 0.047);
}

TEST_CASE("Holder diagnostic", "[sde]") {
  SECTION("constant path") {
    auto path = simulate_sde(make_spec(0.0, 2, 1), CoefficientModel::parse("1;0"));
    CHECK(holder_diagnostic(path, 0.6, 0.6).zeta_hat == 0.0);
  }
  SECTION("linear path against a direct scan") {
    auto path = simulate_sde(make_spec(1.0, 2, 1), CoefficientModel::builtin("drift_only"));
    const double beta = 0.6, gamma = 0.6, kappa = gamma / beta;
    double best = 0.0;
    const auto& g = path.fine_grid;
    for (std::size_t len = 1; len * g.step <= 1.0; len *= 2) {
      std::size_t stride = std::max<std::size_t>(1, len / 2);
      for (std::size_t s = 0; s + len <= g.count; s += stride) {
        double t1 = g.time(s), t2 = g.time(s + len);
        best = std::max(best, (t2 - t1) / (std::pow(t2 - t1, beta) * std::pow(std::log(t2 + 2), kappa)));
      }
    }
    CHECK_THAT(holder_diagnostic(path, beta, gamma).zeta_hat, WithinRel(best, 1e-12));
  }
  SECTION("stable under observation refinement") {
    const auto model = CoefficientModel::builtin("tame");
    std::vector<double> z4, z5;
    for (std::uint64_t s = 0; s < 50; ++s) {
      z4.push_back(holder_diagnostic(simulate_sde(make_spec(2.0, 4, s), model), 0.6, 0.6).zeta_hat);
      z5.push_back(holder_diagnostic(simulate_sde(make_spec(2.0, 5, s), model), 0.6, 0.6).zeta_hat);
    }
    INFO("median n=4 " << median(z4) << " n=5 " << median(z5));
    CHECK(std::abs(median(z5) - median(z4)) < 0.5 * median(z4));
  }
}

TEST_CASE("increment bound constant is stable", "[sde]") {
  const auto model = CoefficientModel::builtin("tame");
  const HurstParam H(0.7);
  const FracOrder alpha(0.35);
  std::vector<double> medians;
  for (int n : {3, 4, 5}) {
    std::vector<double> m;
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto spec = make_spec(2.0, n, s);
      auto drv = driving_fbm(spec);
      auto path = simulate_sde_with_driver(2.0, model, 0.0, H, simulation_grid(n, 8), drv);
      double mhat = increment_bound_constant(path, SampledPath{drv, path.fine_grid.step}, alpha, 0.6);
      CHECK(std::isfinite(mhat));
      CHECK(mhat > 0.0);
      m.push_back(mhat);
    }
    medians.push_back(median(m));
  }
  for (double m : medians) {
    CHECK(m < 2.0 * medians.front());
    CHECK(m > 0.5 * medians.front());
  }
}
