#include "fbmdrift/sde.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fbmdrift/errors.h"

namespace fbmdrift {

ObservationGrid::ObservationGrid(int n) : n_(n) {
  if (n < 1 || n > kMaxLevel) throw DomainError(fmt::format("observation level n must lie in [1, {}], got {}", kMaxLevel, n));
}

double ObservationGrid::step() const noexcept { return std::ldexp(1.0, -n_); }
double ObservationGrid::horizon() const noexcept { return std::ldexp(1.0, n_); }

ObservationGrid ObservationGrid::from_points(std::size_t points) {
  for (int n = 1; n <= kMaxLevel; ++n) {
    if ((std::size_t{1} << (2 * n)) + 1 == points) return ObservationGrid(n);
  }
  throw AlignmentError(fmt::format("{} observations is not of the form 2^(2n)+1", points));
}

ObservationSeries::ObservationSeries(ObservationGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.points())
    throw AlignmentError(fmt::format("observation series for n={} needs {} values, got {}", grid.n(), grid.points(), values.size()));
}

std::string_view to_string(DriverClock clock) {
  return clock == DriverClock::horizon ? "horizon" : "unit";
}

DriverClock parse_driver_clock(std::string_view text) {
  if (text == "horizon") return DriverClock::horizon;
  if (text == "unit" || text == "unit_interval") return DriverClock::unit_interval;
  throw ConfigError("driver_clock", fmt::format("expected 'horizon' or 'unit', got '{}'", text));
}

FineGrid simulation_grid(int obs_n, int refinement) {
  const ObservationGrid obs(obs_n);
  if (refinement < 1) throw DomainError(fmt::format("refinement must be at least 1, got {}", refinement));
  const std::size_t count = obs.intervals() * static_cast<std::size_t>(refinement);
  return FineGrid{obs.horizon(), obs.step() / refinement, count};
}

std::vector<double> driving_fbm(const SimulationSpec& spec) {
  const FineGrid grid = simulation_grid(spec.obs_n, spec.refinement);
  const FineGrid noise_grid = spec.clock == DriverClock::horizon ? grid : FineGrid::from_count(1.0, grid.count);
  return generate_fbm(spec.hurst, noise_grid, spec.seed, spec.stream).values;
}

SdePath simulate_sde_with_driver(double theta, const CoefficientModel& model, double x0, HurstParam hurst,
                                 const FineGrid& grid, std::span<const double> driver) {
  if (driver.size() != grid.count + 1)
    throw AlignmentError(fmt::format("driver has {} points, grid needs {}", driver.size(), grid.count + 1));
  std::vector<double> x(grid.count + 1);
  x[0] = x0;
  const double dt = grid.step;
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double xj = x[j];
    const double next = xj + theta * model.a(xj) * dt + model.b(xj) * (driver[j + 1] - driver[j]);
    if (!std::isfinite(next))
      throw NumericalError(fmt::format("Euler scheme produced a non-finite state at step {} (t = {})", j + 1,
                                       static_cast<double>(j + 1) * dt));
    x[j + 1] = next;
  }
  return SdePath{grid, std::move(x), theta, x0, hurst, 0};
}

SdePath simulate_sde(const SimulationSpec& spec, const CoefficientModel& model) {
  spec.hurst.require_long_memory();
  const FineGrid grid = simulation_grid(spec.obs_n, spec.refinement);
  const auto driver = driving_fbm(spec);
  SdePath path = simulate_sde_with_driver(spec.theta, model, spec.x0, spec.hurst, grid, driver);
  path.driver_seed = spec.seed;
  return path;
}

ObservationSeries downsample(const SdePath& path, const ObservationGrid& grid) {
  const FineGrid& fine = path.fine_grid;
  const std::size_t intervals = grid.intervals();
  if (std::abs(fine.horizon - grid.horizon()) > 1e-12 * grid.horizon() || fine.count % intervals != 0)
    throw AlignmentError(fmt::format("observation grid n={} does not align with a fine grid of {} steps on [0, {}]",
                                     grid.n(), fine.count, fine.horizon));
  const std::size_t r = fine.count / intervals;
  std::vector<double> values(grid.points());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = path.values[k * r];
  return ObservationSeries(grid, std::move(values));
}

namespace {

// Dyadic pairs (in grid cells) with length <= max_cells.
template <typename Visit>
void for_each_increment_pair(std::size_t n, std::size_t min_cells, std::size_t max_cells, Visit&& visit) {
  for (std::size_t cells = min_cells; cells <= max_cells && cells <= n; cells *= 2) {
    const std::size_t stride = std::max<std::size_t>(1, cells / 2);
    for (std::size_t start = 0; start + cells <= n; start += stride) visit(start, cells);
  }
}

std::size_t unit_cells(double step) {
  std::size_t p = 1;
  while (static_cast<double>(2 * p) * step <= 1.0 + 1e-12) p *= 2;
  return p;
}

}  // namespace

HolderDiagnostic holder_diagnostic(const SdePath& path, double beta, double gamma) {
  if (!(beta > 0.5 && beta < path.hurst.value()))
    throw DomainError(fmt::format("beta must lie in (1/2, H) = (1/2, {}), got {}", path.hurst.value(), beta));
  if (!(gamma > 0.5)) throw DomainError(fmt::format("gamma must exceed 1/2, got {}", gamma));
  const double kappa = gamma / beta;
  const double step = path.fine_grid.step;
  HolderDiagnostic d;
  for_each_increment_pair(path.fine_grid.count, 1, unit_cells(step), [&](std::size_t start, std::size_t cells) {
    const double t1 = static_cast<double>(start) * step;
    const double len = static_cast<double>(cells) * step;
    const double t2 = t1 + len;
    const double ratio = std::abs(path.values[start + cells] - path.values[start]) /
                         (std::pow(len, beta) * std::pow(std::log(t2 + 2.0), kappa));
    ++d.pair_count;
    if (ratio > d.zeta_hat) {
      d.zeta_hat = ratio;
      d.t1 = t1;
      d.t2 = t2;
    }
  });
  return d;
}

double increment_bound_constant(const SdePath& path, SampledPath driver, FracOrder alpha, double beta) {
  if (driver.values.size() != path.values.size() || std::abs(driver.step - path.fine_grid.step) > 1e-15)
    throw AlignmentError("driver and solution must share the simulation grid");
  const double step = path.fine_grid.step;
  const LambdaTable lambda(driver, beta, alpha, path.hurst, 1.0);
  double m_hat = 0.0;
  for_each_increment_pair(path.fine_grid.count, 4, unit_cells(step), [&](std::size_t start, std::size_t cells) {
    const double t1 = static_cast<double>(start) * step;
    const double len = static_cast<double>(cells) * step;
    const double lam = lambda(t1, t1 + len);
    const double bound = lam * std::pow(len, beta) + std::pow(lam, 1.0 / beta) * len;
    m_hat = std::max(m_hat, std::abs(path.values[start + cells] - path.values[start]) / bound);
  });
  return m_hat;
}

}  // namespace fbmdrift
