#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fbmdrift/coefficients.h"
#include "fbmdrift/fbm.h"
#include "fbmdrift/sde.h"

namespace fbmdrift {

enum class EstimatorKind { weighted, simple };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view text);

struct EstimateResult {
  EstimatorKind kind = EstimatorKind::simple;
  double value = 0.0;
  int n = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<HurstParam> hurst_used;  // present iff kind == weighted
  double min_abs_b = 0.0;                // min |b(X_{t_{k-1}})| over used points
  std::optional<std::string> warning;
};

/// Beta-weighted estimator with weights t_k^lambda (2^n - t_k)^lambda,
/// lambda = 1/2 - H, over k = 1..2^{2n}-1.
EstimateResult estimate_theta1(const ObservationSeries& obs, const CoefficientModel& model, HurstParam hurst);

/// Unweighted (discretized Wiener-MLE) estimator over k = 1..2^{2n}-1.
EstimateResult estimate_theta2(const ObservationSeries& obs, const CoefficientModel& model);

/// Normalized weight sum gamma_n = sum_{k=1}^{2^{2n}-1} (k/4^n)^lambda (1 - k/4^n)^lambda / 4^n,
/// converging to B(1+lambda, 1+lambda). Requires lambda > -1.
double beta_weight_sum(int n, double lambda);

namespace detail {

struct WeightedSums {
  double numerator = 0.0;
  double denominator = 0.0;
  double min_abs_b = 0.0;
};

/// Numerator and denominator of the weighted estimator for an arbitrary
/// exponent; lambda == 0 yields the unweighted sums bit for bit.
WeightedSums weighted_sums(const ObservationSeries& obs, const CoefficientModel& model, double lambda);

}  // namespace detail

}  // namespace fbmdrift
