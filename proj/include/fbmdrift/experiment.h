#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbmdrift/coefficients.h"
#include "fbmdrift/estimators.h"
#include "fbmdrift/fbm.h"
#include "fbmdrift/sde.h"

namespace fbmdrift {

struct ExperimentConfig {
  double theta = 0.0;
  CoefficientModel model = CoefficientModel::builtin("tame");
  std::vector<HurstParam> hurst_list;
  std::vector<int> n_list;
  int replicates = 20;
  int refinement = 8;
  std::uint64_t base_seed = 0;
  std::vector<EstimatorKind> estimators{EstimatorKind::weighted, EstimatorKind::simple};
  double x0 = 0.0;
  DriverClock clock = DriverClock::horizon;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct CellResult {
  double hurst = 0.0;
  int n = 0;
  EstimatorKind kind = EstimatorKind::simple;
  std::vector<double> estimates;   // one per replicate, NaN for failures
  std::vector<double> rel_errors;  // |estimate - theta| / |theta|, NaN for failures
  std::size_t failures = 0;
  double mean_rel_error = 0.0;     // over successful replicates
  double median_rel_error = 0.0;
  double wall_time_ms = 0.0;       // mean estimator time per replicate
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct RateFitEntry {
  double hurst = 0.0;
  EstimatorKind kind = EstimatorKind::simple;
  RateFit fit;
};

struct ExperimentReport {
  std::vector<CellResult> cells;  // ordered by (hurst index, n index, estimator index)
  std::vector<RateFitEntry> rate_fits;

  /// Throws DomainError if absent.
  const CellResult& cell(double hurst, int n, EstimatorKind kind) const;
};

/// Simulates replicates x hurst_list x n_list with seed streams keyed by
/// (base_seed, hurst index, n, replicate) and estimates theta on each path.
/// The result does not depend on the number of worker threads.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Least squares of log2(mean error) on n for one (H, estimator) series.
/// Needs at least 3 n-values with successful replicates.
RateFit rate_fit(const ExperimentReport& report, double hurst, EstimatorKind kind);
RateFit fit_log2_rate(std::span<const double> n, std::span<const double> errors);

struct PathologyResult {
  std::vector<double> weighted;  // NaN for failed replicates
  std::vector<double> simple;
  std::size_t failures = 0;
  double weighted_iqr_over_theta = 0.0;
  double simple_iqr_over_theta = 0.0;
  double weighted_median = 0.0;
  double simple_median = 0.0;
};

struct PathologySpec {
  double theta = 2.0;
  HurstParam hurst{0.7};
  int n = 6;
  int replicates = 10;
  int refinement = 8;
  std::uint64_t seed = 0;
  DriverClock clock = DriverClock::horizon;
  double x0 = 0.0;
};

/// Raw estimates for a (typically condition-(D)-violating) model with the
/// interquartile range of each estimator relative to |theta|.
PathologyResult pathology_run(const CoefficientModel& model, const PathologySpec& spec);

/// Sample quantile with linear interpolation between order statistics
/// (type 7). NaN entries are ignored.
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);
double interquartile_range(std::span<const double> values);

/// Worker count: FBMDRIFT_THREADS if set and nonzero, else hardware concurrency.
unsigned default_thread_count();

}  // namespace fbmdrift
