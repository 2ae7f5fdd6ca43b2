#include "fbmdrift/estimators.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fbmdrift/errors.h"

namespace fbmdrift {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

constexpr double kSmallDiffusion = 0.01;

// (t_k)^lambda (T - t_k)^lambda with t_k = k h, T - t_k = (N - k) h,
// evaluated in log space to stay finite for large n.
double beta_weight(std::size_t k, std::size_t intervals, double h, double lambda) {
  if (lambda == 0.0) return 1.0;
  const double t = static_cast<double>(k) * h;
  const double rest = static_cast<double>(intervals - k) * h;
  return std::exp(lambda * (std::log(t) + std::log(rest)));
}

EstimateResult finish(EstimatorKind kind, const ObservationSeries& obs, const detail::WeightedSums& sums) {
  if (sums.denominator == 0.0 || !std::isfinite(sums.denominator))
    throw NumericalError(fmt::format("{} estimator: degenerate denominator {} at n={}", to_string(kind), sums.denominator, obs.grid.n()));
  EstimateResult r;
  r.kind = kind;
  r.n = obs.grid.n();
  r.numerator = sums.numerator;
  r.denominator = sums.denominator;
  r.value = sums.numerator / sums.denominator;
  r.min_abs_b = sums.min_abs_b;
  if (sums.min_abs_b < kSmallDiffusion)
    r.warning = fmt::format("min |b(X)| = {:.3g} at observed states; estimate may be unreliable", sums.min_abs_b);
  return r;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) { return kind == EstimatorKind::weighted ? "weighted" : "simple"; }

EstimatorKind parse_estimator_kind(std::string_view text) {
  if (text == "weighted") return EstimatorKind::weighted;
  if (text == "simple") return EstimatorKind::simple;
  throw ConfigError("estimator", fmt::format("expected 'weighted' or 'simple', got '{}'", text));
}

namespace detail {

WeightedSums weighted_sums(const ObservationSeries& obs, const CoefficientModel& model, double lambda) {
  const std::size_t intervals = obs.grid.intervals();
  const double h = obs.grid.step();
  CompensatedSum num, den;
  double min_b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < intervals; ++k) {
    const double x_prev = obs.values[k - 1];
    const double b = model.b(x_prev);
    if (b == 0.0)
      throw NumericalError(fmt::format("b(X_(t_(k-1))) = 0 at k = {} (X = {}); estimator undefined", k, x_prev));
    min_b = std::min(min_b, std::abs(b));
    const double w = beta_weight(k, intervals, h, lambda);
    num.add(w * ((obs.values[k] - x_prev) / b));
    den.add(w * (model.a(x_prev) / b) * h);
  }
  return WeightedSums{num.value(), den.value(), min_b};
}

}  // namespace detail

EstimateResult estimate_theta1(const ObservationSeries& obs, const CoefficientModel& model, HurstParam hurst) {
  hurst.require_long_memory();
  const double lambda = 0.5 - hurst.value();
  auto r = finish(EstimatorKind::weighted, obs, detail::weighted_sums(obs, model, lambda));
  r.hurst_used = hurst;
  return r;
}

EstimateResult estimate_theta2(const ObservationSeries& obs, const CoefficientModel& model) {
  const std::size_t intervals = obs.grid.intervals();
  const double h = obs.grid.step();
  CompensatedSum num, den;
  double min_b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < intervals; ++k) {
    const double x_prev = obs.values[k - 1];
    const double b = model.b(x_prev);
    if (b == 0.0)
      throw NumericalError(fmt::format("b(X_(t_(k-1))) = 0 at k = {} (X = {}); estimator undefined", k, x_prev));
    min_b = std::min(min_b, std::abs(b));
    num.add((obs.values[k] - x_prev) / b);
    den.add(model.a(x_prev) / b);
  }
  return finish(EstimatorKind::simple, obs, detail::WeightedSums{num.value(), den.value() * h, min_b});
}

double beta_weight_sum(int n, double lambda) {
  if (!(lambda > -1.0)) throw DomainError(fmt::format("beta_weight_sum: weights diverge for lambda = {} <= -1", lambda));
  if (n < 1 || n > 15) throw DomainError(fmt::format("beta_weight_sum: n must lie in [1, 15], got {}", n));
  const std::size_t intervals = std::size_t{1} << (2 * n);
  const double h = 1.0 / static_cast<double>(intervals);
  CompensatedSum sum;
  for (std::size_t k = 1; k < intervals; ++k) sum.add(beta_weight(k, intervals, h, lambda) * h);
  return sum.value();
}

}  // namespace fbmdrift
