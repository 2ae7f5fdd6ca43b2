#include "fbmdrift/frac_calculus.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fbmdrift/errors.h"
#include "fbmdrift/special.h"

namespace fbmdrift {

namespace {

constexpr double kGridTol = 1e-9;

// Powers (i*step)^{alpha-1} and (i*step)^alpha for i = 0..cells, shared by
// every grid-aligned pair of the same path.
class KernelTable {
 public:
  KernelTable(double step, double alpha, std::size_t cells) : step_(step), alpha_(alpha), inv_gamma_(1.0 / lanczos_gamma(alpha)) {
    pow_am1_.resize(cells + 1);
    pow_a_.resize(cells + 1);
    pow_am1_[0] = 0.0;  // never used: first-cell constant term vanishes
    pow_a_[0] = 0.0;
    for (std::size_t i = 1; i <= cells; ++i) {
      const double x = static_cast<double>(i) * step;
      pow_a_[i] = std::pow(x, alpha);
      pow_am1_[i] = pow_a_[i] / x;
    }
  }

  std::size_t max_cells() const noexcept { return pow_a_.size() - 1; }

  // |Z| for the pair (i0*step, (i0+cells)*step).
  double magnitude(std::span<const double> v, std::size_t i0, std::size_t cells) const {
    const double f1 = v[i0];
    const double a = alpha_;
    double integral = 0.0;
    double g_a = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double g_b = f1 - v[i0 + i + 1];
      const double slope = (g_b - g_a) / step_;
      double cell = slope * (pow_a_[i + 1] - pow_a_[i]) / a;
      if (i > 0) {
        const double x_a = static_cast<double>(i) * step_;
        cell += (g_a - slope * x_a) * (pow_am1_[i + 1] - pow_am1_[i]) / (a - 1.0);
      }
      integral += cell;
      g_a = g_b;
    }
    const double length = static_cast<double>(cells) * step_;
    const double boundary = (f1 - v[i0 + cells]) * pow_a_[cells] / length;
    return std::abs(boundary + (1.0 - a) * integral) * inv_gamma_;
  }

 private:
  double step_;
  double alpha_;
  double inv_gamma_;
  std::vector<double> pow_am1_;
  std::vector<double> pow_a_;
};

std::size_t lower_index(double t, double step) { return static_cast<std::size_t>(std::ceil(t / step - kGridTol)); }
std::size_t upper_index(double t, double step) { return static_cast<std::size_t>(std::floor(t / step + kGridTol)); }

void check_path(SampledPath path) {
  if (path.values.size() < 2 || !(path.step > 0.0)) throw DomainError("sampled path needs at least two points and a positive step");
}

void check_interval(SampledPath path, double t1, double t2) {
  if (!(t1 < t2)) throw DomainError(fmt::format("fractional derivative requires t1 < t2, got [{}, {}]", t1, t2));
  if (t1 < -kGridTol * path.step || t2 > path.horizon() * (1.0 + kGridTol))
    throw DomainError(fmt::format("[{}, {}] is outside the sampled range [0, {}]", t1, t2, path.horizon()));
}

// Visits the dyadic family inside [lo, hi] (grid indices): cells = 2^j for
// j >= 2 up to max_cells, starts on a 2^{j-1} lattice anchored at index 0.
template <typename Visit>
std::size_t for_each_dyadic_pair(std::size_t lo, std::size_t hi, std::size_t max_cells, Visit&& visit) {
  std::size_t pairs = 0;
  for (std::size_t cells = 4; cells <= max_cells && cells <= hi - lo; cells *= 2) {
    const std::size_t stride = cells / 2;
    for (std::size_t start = (lo + stride - 1) / stride * stride; start + cells <= hi; start += stride) {
      if (pairs == kMaxPairsPerPath) return pairs;
      visit(start, cells);
      ++pairs;
    }
  }
  return pairs;
}

std::size_t largest_power_of_two_at_most(double x) {
  std::size_t p = 1;
  while (static_cast<double>(2 * p) <= x * (1.0 + kGridTol)) p *= 2;
  return p;
}

}  // namespace

double SampledPath::at(double t) const {
  const double h = horizon();
  if (t < -kGridTol * step || t > h * (1.0 + kGridTol)) throw DomainError(fmt::format("t = {} outside [0, {}]", t, h));
  const double pos = std::clamp(t / step, 0.0, static_cast<double>(values.size() - 1));
  const auto j = std::min(static_cast<std::size_t>(pos), values.size() - 2);
  const double w = pos - static_cast<double>(j);
  return values[j] + w * (values[j + 1] - values[j]);
}

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError(fmt::format("fractional order alpha must lie in (0,1/2), got {}", alpha));
}

FracOrder FracOrder::for_hurst(double alpha, HurstParam hurst) {
  FracOrder order(alpha);
  if (!(alpha > 1.0 - hurst.value()))
    throw DomainError(fmt::format("fractional order alpha = {} must exceed 1 - H = {}", alpha, 1.0 - hurst.value()));
  return order;
}

FracDerivSample z_value(SampledPath path, double t1, double t2, FracOrder order) {
  check_path(path);
  check_interval(path, t1, t2);
  if ((t2 - t1) / path.step < 4.0 - kGridTol)
    throw ResolutionError(fmt::format("[{}, {}] spans fewer than 4 sample intervals of {}", t1, t2, path.step));

  const double a = order.value();
  const double f1 = path.at(t1);
  const double f2 = path.at(t2);

  std::vector<double> knots{t1};
  for (std::size_t j = lower_index(t1, path.step); static_cast<double>(j) * path.step < t2; ++j) {
    const double t = static_cast<double>(j) * path.step;
    if (t - knots.back() > kGridTol * path.step && t2 - t > kGridTol * path.step) knots.push_back(t);
  }
  knots.push_back(t2);

  double integral = 0.0;
  double g_a = 0.0;
  double x_a = 0.0;
  double pa_a = 0.0;
  double pam1_a = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double x_b = knots[i] - t1;
    const double g_b = f1 - (i + 1 == knots.size() ? f2 : path.at(knots[i]));
    const double pa_b = std::pow(x_b, a);
    const double pam1_b = pa_b / x_b;
    const double slope = (g_b - g_a) / (x_b - x_a);
    integral += slope * (pa_b - pa_a) / a;
    if (i > 1) integral += (g_a - slope * x_a) * (pam1_b - pam1_a) / (a - 1.0);
    g_a = g_b;
    x_a = x_b;
    pa_a = pa_b;
    pam1_a = pam1_b;
  }
  const double length = t2 - t1;
  const double boundary = (f1 - f2) / std::pow(length, 1.0 - a);
  return FracDerivSample{t1, t2, std::abs(boundary + (1.0 - a) * integral) / lanczos_gamma(a)};
}

namespace {

void check_beta(double beta, HurstParam hurst) {
  if (!(beta > 0.5 && beta < hurst.value()))
    throw DomainError(fmt::format("beta must lie in (1/2, H) = (1/2, {}), got {}", hurst.value(), beta));
}

}  // namespace

double lambda_beta(SampledPath path, double t1, double t2, double beta, FracOrder alpha, HurstParam hurst) {
  check_path(path);
  check_beta(beta, hurst);
  check_interval(path, t1, t2);
  const std::size_t lo = lower_index(t1, path.step);
  const std::size_t hi = upper_index(t2, path.step);
  if (hi < lo + 4) throw ResolutionError("Lambda_beta interval spans fewer than 4 sample intervals");
  const KernelTable kernel(path.step, alpha.value(), hi - lo);
  const double exponent = beta + alpha.value() - 1.0;
  double sup = 1.0;
  for_each_dyadic_pair(lo, hi, hi - lo, [&](std::size_t start, std::size_t cells) {
    const double len = static_cast<double>(cells) * path.step;
    sup = std::max(sup, kernel.magnitude(path.values, start, cells) / std::pow(len, exponent));
  });
  return sup;
}

LambdaTable::LambdaTable(SampledPath path, double beta, FracOrder alpha, HurstParam hurst, double max_length)
    : step_(path.step) {
  check_path(path);
  check_beta(beta, hurst);
  const std::size_t n = path.values.size() - 1;
  const std::size_t max_cells = std::min(n, largest_power_of_two_at_most(max_length / path.step));
  const KernelTable kernel(path.step, alpha.value(), max_cells);
  const double exponent = beta + alpha.value() - 1.0;
  for (std::size_t cells = 4; cells <= max_cells; cells *= 2) {
    Level level{cells, cells / 2, {}};
    const double denom = std::pow(static_cast<double>(cells) * path.step, exponent);
    for (std::size_t start = 0; start + cells <= n; start += level.stride)
      level.ratio.push_back(kernel.magnitude(path.values, start, cells) / denom);
    levels_.push_back(std::move(level));
  }
}

double LambdaTable::operator()(double t1, double t2) const {
  if (!(t1 < t2)) throw DomainError("Lambda_beta requires t1 < t2");
  const std::size_t lo = lower_index(t1, step_);
  const std::size_t hi = upper_index(t2, step_);
  if (hi < lo + 4) throw ResolutionError("Lambda_beta interval spans fewer than 4 sample intervals");
  double sup = 1.0;
  for (const Level& level : levels_) {
    if (level.cells > hi - lo) break;
    for (std::size_t m = (lo + level.stride - 1) / level.stride; m < level.ratio.size(); ++m) {
      if (m * level.stride + level.cells > hi) break;
      sup = std::max(sup, level.ratio[m]);
    }
  }
  return sup;
}

double theorem1_gauge(double s, HurstParam hurst, FracOrder alpha) {
  return std::pow(s, hurst.value() + alpha.value() - 1.0) * (std::sqrt(std::abs(std::log(s))) + 1.0);
}

RatioStatistic theorem1_statistic(std::span<const FbmPath> ensemble, FracOrder alpha, double gamma) {
  if (ensemble.empty()) throw DomainError("theorem1_statistic: empty ensemble");
  if (!(gamma > 0.5)) throw DomainError(fmt::format("gamma must exceed 1/2, got {}", gamma));
  const HurstParam hurst = ensemble.front().hurst;
  RatioStatistic stat;
  stat.gamma = gamma;
  stat.alpha = alpha;
  for (const FbmPath& path : ensemble) {
    if (!(path.hurst == hurst)) throw DomainError("theorem1_statistic: paths must share the Hurst parameter");
    if (path.grid.horizon < 4.0 - kGridTol) throw DomainError("theorem1_statistic: path horizon must be at least 4");
    const SampledPath sp = view(path);
    const std::size_t n = path.grid.count;
    const std::size_t max_cells = std::min(n, largest_power_of_two_at_most(1.0 / sp.step));
    if (max_cells < 4) throw ResolutionError("theorem1_statistic: path step too coarse for unit-length pairs");
    const KernelTable kernel(sp.step, alpha.value(), max_cells);
    stat.pair_count += for_each_dyadic_pair(0, n, max_cells, [&](std::size_t start, std::size_t cells) {
      const double len = static_cast<double>(cells) * sp.step;
      const double t1 = static_cast<double>(start) * sp.step;
      const double t2 = t1 + len;
      const double ratio = kernel.magnitude(sp.values, start, cells) /
                           (theorem1_gauge(len, hurst, alpha) * std::pow(std::log(t2 + 2.0), gamma));
      if (ratio > stat.value) {
        stat.value = ratio;
        stat.argmax_t1 = t1;
        stat.argmax_t2 = t2;
      }
    });
  }
  return stat;
}

ScalingFit theorem1_scaling(const FbmPath& path, FracOrder alpha, double gamma, int coarsest_exp, int finest_exp) {
  if (!(gamma > 0.5)) throw DomainError(fmt::format("gamma must exceed 1/2, got {}", gamma));
  if (coarsest_exp > finest_exp - 2) throw DomainError("theorem1_scaling needs at least three scales");
  const SampledPath sp = view(path);
  const std::size_t n = path.grid.count;
  ScalingFit fit;
  const double finest = std::ldexp(1.0, -finest_exp);
  const std::size_t finest_cells = static_cast<std::size_t>(std::llround(finest / sp.step));
  if (finest_cells < 4 || std::abs(static_cast<double>(finest_cells) * sp.step - finest) > kGridTol * finest)
    throw ResolutionError("theorem1_scaling: finest scale must be a multiple of at least 4 path steps");
  const KernelTable kernel(sp.step, alpha.value(), finest_cells << (finest_exp - coarsest_exp));
  for (int k = coarsest_exp; k <= finest_exp; ++k) {
    const double len = std::ldexp(1.0, -k);
    const std::size_t cells = finest_cells << (finest_exp - k);
    const std::size_t stride = cells / 2;
    const double gauge = theorem1_gauge(len, path.hurst, alpha);
    double best = 0.0;
    for (std::size_t start = 0; start + cells <= n; start += stride) {
      const double t2 = static_cast<double>(start + cells) * sp.step;
      best = std::max(best, kernel.magnitude(sp.values, start, cells) / (gauge * std::pow(std::log(t2 + 2.0), gamma)));
    }
    fit.scales.push_back(len);
    fit.ratios.push_back(best);
  }
  // least squares of log2(ratio) on log2(scale)
  const double m = static_cast<double>(fit.scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < fit.scales.size(); ++i) {
    const double x = std::log2(fit.scales[i]);
    const double y = std::log2(std::max(fit.ratios[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

}  // namespace fbmdrift
