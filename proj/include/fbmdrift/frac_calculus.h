#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbmdrift/fbm.h"

namespace fbmdrift {

/// Read-only view of a function sampled at j * step, j = 0..values.size()-1,
/// interpreted as its piecewise-linear interpolant.
struct SampledPath {
  std::span<const double> values;
  double step = 0.0;

  double horizon() const noexcept { return step * static_cast<double>(values.size() - 1); }
  double at(double t) const;  // linear interpolation, t in [0, horizon]
};

inline SampledPath view(const FbmPath& path) { return SampledPath{path.values, path.grid.step}; }

/// Order of the right-sided fractional derivative, alpha in (0, 1/2);
/// `for_hurst` additionally enforces alpha > 1 - H.
class FracOrder {
 public:
  explicit FracOrder(double alpha);
  static FracOrder for_hurst(double alpha, HurstParam hurst);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct FracDerivSample {
  double t1 = 0.0;
  double t2 = 0.0;
  double magnitude = 0.0;
};

/// |Z(t1,t2)|: magnitude of the right-sided derivative of order 1-alpha of
/// f - f(t2), evaluated at t1. The singular integral is integrated exactly
/// for the piecewise-linear interpolant of the samples.
/// Requires t1 < t2 and (t2 - t1) >= 4 * step.
FracDerivSample z_value(SampledPath path, double t1, double t2, FracOrder alpha);

/// Cap on the number of dyadic pairs scanned per path.
inline constexpr std::size_t kMaxPairsPerPath = 1'000'000;

/// Lambda_beta(t1,t2) = max(1, sup |Z(u,v)| / (v-u)^{beta+alpha-1}) over the
/// dyadic family: v - u = step * 2^j (j >= 2), u on the step * 2^{j-1}
/// lattice anchored at 0, t1 <= u < v <= t2.
double lambda_beta(SampledPath path, double t1, double t2, double beta, FracOrder alpha, HurstParam hurst);

/// Precomputed dyadic |Z| ratios of one path for repeated Lambda_beta
/// queries. Agrees exactly with lambda_beta.
class LambdaTable {
 public:
  LambdaTable(SampledPath path, double beta, FracOrder alpha, HurstParam hurst, double max_length);
  double operator()(double t1, double t2) const;

 private:
  struct Level {
    std::size_t cells;   // v - u in grid cells
    std::size_t stride;  // lattice spacing of u in grid cells
    std::vector<double> ratio;
  };
  double step_;
  std::vector<Level> levels_;
};

struct RatioStatistic {
  double value = 0.0;
  double gamma = 0.0;
  FracOrder alpha{0.25};
  std::size_t pair_count = 0;
  double argmax_t1 = 0.0;
  double argmax_t2 = 0.0;
};

/// Empirical xi_{H,alpha,gamma}: max over paths and dyadic pairs with
/// t2 - t1 <= 1 of |Z(t1,t2)| / (h(t2-t1) (log(t2+2))^gamma), where
/// h(s) = s^{H+alpha-1} (|log s|^{1/2} + 1). All paths must share H.
RatioStatistic theorem1_statistic(std::span<const FbmPath> ensemble, FracOrder alpha, double gamma);

/// The sup-ratio of theorem1_statistic maximized separately at each scale 2^{-k},
/// k = finest..coarsest, with a least-squares fit of log2(max ratio)
/// against log2(scale).
struct ScalingFit {
  std::vector<double> scales;
  std::vector<double> ratios;
  double slope = 0.0;
  double intercept = 0.0;
};
ScalingFit theorem1_scaling(const FbmPath& path, FracOrder alpha, double gamma, int coarsest_exp = 2,
                            int finest_exp = 6);

/// h(s) = s^{H+alpha-1} (|log s|^{1/2} + 1).
double theorem1_gauge(double s, HurstParam hurst, FracOrder alpha);

}  // namespace fbmdrift
