#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fbmdrift {

/// Hurst index of a fractional Brownian motion, 0 < H < 1.
class HurstParam {
 public:
  explicit HurstParam(double value);

  double value() const noexcept { return value_; }

  /// Throws DomainError unless 1/2 < H < 1, the range where the drift
  /// estimators and the pathwise integral are defined.
  const HurstParam& require_long_memory() const;

  friend bool operator==(const HurstParam&, const HurstParam&) = default;

 private:
  double value_;
};

/// Uniform grid j * step, j = 0..count, on [0, horizon].
struct FineGrid {
  double horizon = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  static FineGrid from_count(double horizon, std::size_t count);
  /// `horizon / step` must be an integer up to 1e-9 relative rounding.
  static FineGrid from_step(double horizon, double step);

  double time(std::size_t j) const noexcept { return static_cast<double>(j) * step; }
  std::size_t points() const noexcept { return count + 1; }
};

struct FbmPath {
  FineGrid grid;
  std::vector<double> values;  // values[0] == 0
  HurstParam hurst;
  std::uint64_t seed = 0;
};

/// E[B_s B_t] = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstParam hurst);

/// Autocovariance of fractional Gaussian noise with spacing `step` at lag k.
double increment_autocovariance(std::ptrdiff_t lag, double step, HurstParam hurst);

/// Eigenvalues of the minimal circulant embedding (size 2*count) of the
/// increment autocovariance r(0..count). Entries may be slightly negative;
/// callers decide whether to clip or fall back.
std::vector<double> embedding_spectrum(std::size_t count, double step, HurstParam hurst);

enum class FbmMethod { circulant, cholesky };

struct FbmOptions {
  /// Negative eigenvalues above -tol * max_eigenvalue are clipped to zero.
  double clip_tolerance = 1e-8;
  /// Largest count for which the dense Cholesky fallback is attempted.
  std::size_t cholesky_limit = 4096;
  /// Forces a method; by default circulant embedding with Cholesky fallback.
  bool force_cholesky = false;
};

/// Exact-in-distribution fBm sample on `grid`. Deterministic in
/// (hurst, grid, seed, stream). `stream` selects an independent path of the
/// same seed (e.g. a replicate index).
FbmPath generate_fbm(HurstParam hurst, const FineGrid& grid, std::uint64_t seed, std::uint64_t stream = 0,
                     const FbmOptions& options = {});

/// Increments only (length grid.count); same distribution and stream
/// semantics as generate_fbm.
std::vector<double> generate_fgn(HurstParam hurst, const FineGrid& grid, std::uint64_t seed,
                                 std::uint64_t stream = 0, const FbmOptions& options = {},
                                 FbmMethod* used = nullptr);

}  // namespace fbmdrift
