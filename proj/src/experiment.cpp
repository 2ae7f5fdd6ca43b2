#include "fbmdrift/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "fbmdrift/errors.h"
#include "fbmdrift/rng.h"

namespace fbmdrift {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count) on `threads` workers. The first
// exception is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> finite_sorted(std::span<const double> values) {
  std::vector<double> v;
  for (double x : values)
    if (!std::isnan(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v;
}

double mean_of_finite(std::span<const double> values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double x : values) {
    if (std::isnan(x)) continue;
    sum += x;
    ++count;
  }
  return count == 0 ? kNaN : sum / static_cast<double>(count);
}

struct ReplicateOutcome {
  double estimate = kNaN;
  double seconds = 0.0;
};

}  // namespace

unsigned default_thread_count() {
  if (const char* env = std::getenv("FBMDRIFT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ExperimentConfig::validate() const {
  if (!std::isfinite(theta) || theta == 0.0) throw ConfigError("theta", "must be finite and nonzero (relative errors divide by |theta|)");
  if (hurst_list.empty()) throw ConfigError("hurst", "at least one Hurst value is required");
  for (const auto& h : hurst_list)
    if (!(h.value() > 0.5 && h.value() < 1.0)) throw ConfigError("hurst", fmt::format("{} is outside (1/2, 1)", h.value()));
  if (n_list.empty()) throw ConfigError("n", "at least one observation level is required");
  for (int n : n_list)
    if (n < 1 || n > ObservationGrid::kMaxLevel) throw ConfigError("n", fmt::format("{} is outside [1, {}]", n, ObservationGrid::kMaxLevel));
  if (replicates < 1) throw ConfigError("replicates", "must be at least 1");
  if (refinement < 1) throw ConfigError("refinement", "must be at least 1");
  if (estimators.empty()) throw ConfigError("estimator", "at least one estimator is required");
}

const CellResult& ExperimentReport::cell(double hurst, int n, EstimatorKind kind) const {
  for (const auto& c : cells)
    if (c.hurst == hurst && c.n == n && c.kind == kind) return c;
  throw DomainError(fmt::format("no cell for H={}, n={}, estimator={}", hurst, n, to_string(kind)));
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_h = config.hurst_list.size();
  const std::size_t n_n = config.n_list.size();
  const std::size_t n_r = static_cast<std::size_t>(config.replicates);
  const std::size_t n_e = config.estimators.size();
  const std::size_t tasks = n_h * n_n * n_r;

  std::vector<ReplicateOutcome> outcomes(tasks * n_e);
  const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;

  parallel_for(tasks, threads, [&](std::size_t task) {
    const std::size_t r = task % n_r;
    const std::size_t ni = (task / n_r) % n_n;
    const std::size_t hi = task / (n_r * n_n);
    SimulationSpec spec;
    spec.theta = config.theta;
    spec.x0 = config.x0;
    spec.hurst = config.hurst_list[hi];
    spec.obs_n = config.n_list[ni];
    spec.refinement = config.refinement;
    spec.seed = stream_key(config.base_seed, {hi, static_cast<std::uint64_t>(spec.obs_n), r});
    spec.clock = config.clock;
    std::optional<ObservationSeries> obs;
    try {
      obs = downsample(simulate_sde(spec, config.model), ObservationGrid(spec.obs_n));
    } catch (const NumericalError&) {
      return;  // every estimator of this replicate fails
    }
    for (std::size_t e = 0; e < n_e; ++e) {
      auto& out = outcomes[task * n_e + e];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto est = config.estimators[e] == EstimatorKind::weighted
                             ? estimate_theta1(*obs, config.model, spec.hurst)
                             : estimate_theta2(*obs, config.model);
        out.estimate = est.value;
      } catch (const NumericalError&) {
        out.estimate = kNaN;
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });

  ExperimentReport report;
  const double abs_theta = std::abs(config.theta);
  for (std::size_t hi = 0; hi < n_h; ++hi) {
    for (std::size_t ni = 0; ni < n_n; ++ni) {
      for (std::size_t e = 0; e < n_e; ++e) {
        CellResult cell;
        cell.hurst = config.hurst_list[hi].value();
        cell.n = config.n_list[ni];
        cell.kind = config.estimators[e];
        double seconds = 0.0;
        for (std::size_t r = 0; r < n_r; ++r) {
          const auto& out = outcomes[((hi * n_n + ni) * n_r + r) * n_e + e];
          cell.estimates.push_back(out.estimate);
          cell.rel_errors.push_back(std::isnan(out.estimate) ? kNaN : std::abs(out.estimate - config.theta) / abs_theta);
          if (std::isnan(out.estimate)) ++cell.failures;
          seconds += out.seconds;
        }
        cell.mean_rel_error = mean_of_finite(cell.rel_errors);
        cell.median_rel_error = median(cell.rel_errors);
        cell.wall_time_ms = 1e3 * seconds / static_cast<double>(n_r);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  if (n_n >= 3) {
    for (const auto& h : config.hurst_list) {
      for (EstimatorKind kind : config.estimators) {
        try {
          report.rate_fits.push_back(RateFitEntry{h.value(), kind, rate_fit(report, h.value(), kind)});
        } catch (const DomainError&) {
          // too many failed cells for a fit; the report still carries the cells
        }
      }
    }
  }
  return report;
}

RateFit fit_log2_rate(std::span<const double> n, std::span<const double> errors) {
  if (n.size() != errors.size()) throw DomainError("fit_log2_rate: size mismatch");
  if (n.size() < 3) throw DomainError(fmt::format("rate fit needs at least 3 observation levels, got {}", n.size()));
  const double m = static_cast<double>(n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(errors[i] > 0.0)) throw DomainError("rate fit needs strictly positive errors");
    const double y = std::log2(errors[i]);
    sx += n[i];
    sy += y;
    sxx += n[i] * n[i];
    sxy += n[i] * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("rate fit needs distinct observation levels");
  RateFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

RateFit rate_fit(const ExperimentReport& report, double hurst, EstimatorKind kind) {
  std::vector<double> ns, errs;
  for (const auto& c : report.cells) {
    if (c.hurst != hurst || c.kind != kind || std::isnan(c.mean_rel_error)) continue;
    ns.push_back(static_cast<double>(c.n));
    errs.push_back(c.mean_rel_error);
  }
  if (ns.size() < 3)
    throw DomainError(fmt::format("insufficient data: rate fit for H={}, {} needs 3 levels, have {}", hurst, to_string(kind), ns.size()));
  return fit_log2_rate(ns, errs);
}

double quantile(std::span<const double> values, double p) {
  const auto v = finite_sorted(values);
  if (v.empty()) return kNaN;
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double interquartile_range(std::span<const double> values) { return quantile(values, 0.75) - quantile(values, 0.25); }

PathologyResult pathology_run(const CoefficientModel& model, const PathologySpec& spec) {
  ExperimentConfig config;
  config.theta = spec.theta;
  config.model = model;
  config.hurst_list = {spec.hurst};
  config.n_list = {spec.n};
  config.replicates = spec.replicates;
  config.refinement = spec.refinement;
  config.base_seed = spec.seed;
  config.clock = spec.clock;
  config.x0 = spec.x0;
  const auto report = run_experiment(config);
  const auto& w = report.cell(spec.hurst.value(), spec.n, EstimatorKind::weighted);
  const auto& s = report.cell(spec.hurst.value(), spec.n, EstimatorKind::simple);
  PathologyResult r;
  r.weighted = w.estimates;
  r.simple = s.estimates;
  r.failures = std::max(w.failures, s.failures);
  const double abs_theta = std::abs(spec.theta);
  r.weighted_iqr_over_theta = interquartile_range(r.weighted) / abs_theta;
  r.simple_iqr_over_theta = interquartile_range(r.simple) / abs_theta;
  r.weighted_median = median(r.weighted);
  r.simple_median = median(r.simple);
  return r;
}

}  // namespace fbmdrift
