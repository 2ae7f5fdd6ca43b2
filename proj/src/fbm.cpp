#include "fbmdrift/fbm.h"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

#include <fmt/format.h>

#include "fbmdrift/errors.h"
#include "fbmdrift/rng.h"

namespace fbmdrift {

HurstParam::HurstParam(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) throw DomainError(fmt::format("Hurst parameter must lie in (0,1), got {}", value));
}

const HurstParam& HurstParam::require_long_memory() const {
  if (!(value_ > 0.5)) throw DomainError(fmt::format("Hurst parameter must lie in (1/2,1), got {}", value_));
  return *this;
}

FineGrid FineGrid::from_count(double horizon, std::size_t count) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid horizon must be positive");
  if (count < 1) throw DomainError("grid count must be at least 1");
  return FineGrid{horizon, horizon / static_cast<double>(count), count};
}

FineGrid FineGrid::from_step(double horizon, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid horizon must be positive");
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
    throw DomainError(fmt::format("horizon {} is not an integer multiple of step {}", horizon, step));
  return FineGrid{horizon, step, static_cast<std::size_t>(rounded)};
}

double fbm_covariance(double s, double t, HurstParam hurst) {
  if (s < 0.0 || t < 0.0) throw DomainError("fbm_covariance: times must be non-negative");
  const double two_h = 2.0 * hurst.value();
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

double increment_autocovariance(std::ptrdiff_t lag, double step, HurstParam hurst) {
  const double two_h = 2.0 * hurst.value();
  const double k = std::abs(static_cast<double>(lag));
  const double scale = 0.5 * std::pow(step, two_h);
  if (k == 0.0) return std::pow(step, two_h);
  return scale * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

// In-place forward DFT, X_k = sum_j x_j exp(-2 pi i jk / n).
void forward_dft(fftw_complex* data, std::size_t n) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::vector<double> circulant_row(std::size_t count, double step, HurstParam hurst) {
  const std::size_t m = 2 * count;
  std::vector<double> row(m);
  for (std::size_t k = 0; k <= count; ++k) row[k] = increment_autocovariance(static_cast<std::ptrdiff_t>(k), step, hurst);
  for (std::size_t k = count + 1; k < m; ++k) row[k] = row[m - k];
  return row;
}

std::vector<double> sample_circulant(const std::vector<double>& eigenvalues, std::size_t count, NormalStream& normal) {
  const std::size_t m = eigenvalues.size();
  auto buf = fftw_buffer(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double amp = std::sqrt(eigenvalues[k] * inv_m);
    const double re = normal();
    const double im = normal();
    buf[k][0] = amp * re;
    buf[k][1] = amp * im;
  }
  forward_dft(buf.get(), m);
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = buf[j][0];
  return out;
}

std::vector<double> sample_cholesky(std::size_t count, double step, HurstParam hurst, NormalStream& normal) {
  const auto n = static_cast<Eigen::Index>(count);
  std::vector<double> acov(count);
  for (std::size_t k = 0; k < count; ++k) acov[k] = increment_autocovariance(static_cast<std::ptrdiff_t>(k), step, hurst);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = acov[static_cast<std::size_t>(std::abs(i - j))];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError(fmt::format("Cholesky factorization of the {}x{} increment covariance failed (H={}, step={})",
                                     count, count, hurst.value(), step));
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  const Eigen::VectorXd x = llt.matrixL() * z;
  return {x.data(), x.data() + n};
}

}  // namespace

std::vector<double> embedding_spectrum(std::size_t count, double step, HurstParam hurst) {
  if (count < 1) throw DomainError("embedding_spectrum: count must be at least 1");
  const auto row = circulant_row(count, step, hurst);
  const std::size_t m = row.size();
  auto buf = fftw_buffer(m);
  for (std::size_t k = 0; k < m; ++k) {
    buf[k][0] = row[k];
    buf[k][1] = 0.0;
  }
  forward_dft(buf.get(), m);
  std::vector<double> eig(m);
  for (std::size_t k = 0; k < m; ++k) eig[k] = buf[k][0];
  return eig;
}

std::vector<double> generate_fgn(HurstParam hurst, const FineGrid& grid, std::uint64_t seed, std::uint64_t stream,
                                 const FbmOptions& options, FbmMethod* used) {
  if (grid.count < 1 || !(grid.step > 0.0)) throw DomainError("generate_fbm: invalid grid");
  NormalStream normal(stream_key(seed, {stream}));

  bool use_cholesky = options.force_cholesky;
  std::vector<double> eig;
  if (!use_cholesky) {
    eig = embedding_spectrum(grid.count, grid.step, hurst);
    const double max_eig = *std::max_element(eig.begin(), eig.end());
    const double min_eig = *std::min_element(eig.begin(), eig.end());
    if (min_eig < -options.clip_tolerance * max_eig) {
      if (grid.count > options.cholesky_limit)
        throw NumericalError(fmt::format(
            "circulant embedding has eigenvalue {} (max {}) and count {} exceeds the Cholesky limit {}", min_eig,
            max_eig, grid.count, options.cholesky_limit));
      use_cholesky = true;
    } else {
      for (double& e : eig) e = std::max(e, 0.0);
    }
  }
  if (used != nullptr) *used = use_cholesky ? FbmMethod::cholesky : FbmMethod::circulant;
  if (use_cholesky) return sample_cholesky(grid.count, grid.step, hurst, normal);
  return sample_circulant(eig, grid.count, normal);
}

FbmPath generate_fbm(HurstParam hurst, const FineGrid& grid, std::uint64_t seed, std::uint64_t stream,
                     const FbmOptions& options) {
  const auto increments = generate_fgn(hurst, grid, seed, stream, options);
  std::vector<double> values(grid.count + 1);
  values[0] = 0.0;
  for (std::size_t j = 0; j < grid.count; ++j) values[j + 1] = values[j] + increments[j];
  return FbmPath{grid, std::move(values), hurst, seed};
}

}  // namespace fbmdrift
