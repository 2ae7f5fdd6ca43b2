#include "fbmdrift/cli.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fbmdrift/errors.h"
#include "fbmdrift/estimators.h"
#include "fbmdrift/experiment.h"
#include "fbmdrift/fbm.h"
#include "fbmdrift/frac_calculus.h"
#include "fbmdrift/report.h"
#include "fbmdrift/sde.h"

namespace fbmdrift::cli {

namespace {

struct KeySpec {
  std::vector<std::string> required;
  KeyValues defaults;
};

const std::map<std::string, KeySpec>& command_keys() {
  static const std::map<std::string, KeySpec> specs = {
      {"fbm", {{"hurst", "horizon", "step"}, {{"seed", "0"}}}},
      {"sde",
       {{"theta", "hurst", "n", "coeff"},
        {{"refinement", "8"}, {"seed", "0"}, {"x0", "0"}, {"driver_clock", "horizon"}}}},
      {"estimate", {{"input", "coeff"}, {{"estimator", "both"}}}},
      {"verify-frac-deriv",
       {{"hurst", "alpha", "gamma"}, {{"paths", "100"}, {"horizon", "8"}, {"step", "0.00390625"}, {"seed", "0"}}}},
  };
  return specs;
}

// Optional keys without a default.
const std::set<std::string>& optional_keys(const std::string& subcommand) {
  static const std::set<std::string> none;
  static const std::set<std::string> estimate = {"hurst"};
  return subcommand == "estimate" ? estimate : none;
}

std::uint64_t seed_of(const KeyValues& kv) {
  return kv.contains("seed") ? static_cast<std::uint64_t>(parse_integer(kv, "seed")) : 0;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return f;
}

void emit_manifest(const std::string& subcommand, const KeyValues& config, const KeyValues& derived,
                   const std::filesystem::path& path) {
  RunManifest m{subcommand, config, derived, seed_of(config), tool_version(), utc_timestamp()};
  write_manifest(m, path);
}

std::filesystem::path manifest_beside(const std::filesystem::path& file) {
  auto p = file;
  p += ".manifest.json";
  return p;
}

// Writes through `body` to the output file (plus manifest) or to stdout.
void write_data(const Invocation& inv, const KeyValues& canonical, const KeyValues& derived, std::ostream& out,
                const std::function<void(std::ostream&)>& body) {
  if (inv.out.empty()) {
    body(out);
    return;
  }
  auto f = open_output(inv.out);
  body(f);
  emit_manifest(inv.subcommand, canonical, derived, manifest_beside(inv.out));
}

ObservationSeries read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("input", fmt::format("cannot read '{}'", path));
  std::string line;
  if (!std::getline(in, line) || line != "k,t,x") throw ConfigError("input", "expected header 'k,t,x'");
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string k, t, x;
    if (!std::getline(ss, k, ',') || !std::getline(ss, t, ',') || !std::getline(ss, x))
      throw ConfigError("input", fmt::format("malformed row '{}'", line));
    try {
      if (std::stoull(k) != values.size()) throw ConfigError("input", fmt::format("row index {} out of order", k));
      times.push_back(std::stod(t));
      values.push_back(std::stod(x));
    } catch (const std::logic_error&) {
      throw ConfigError("input", fmt::format("malformed row '{}'", line));
    }
  }
  const auto grid = ObservationGrid::from_points(values.size());
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - grid.time(k)) > 1e-12 * std::max(1.0, grid.time(k)))
      throw AlignmentError(fmt::format("row {}: t = {} is not k*2^-{}", k, times[k], grid.n()));
  return ObservationSeries(grid, std::move(values));
}

void run_fbm(const Invocation& inv, const KeyValues& kv, std::ostream& out) {
  const HurstParam hurst(parse_real(kv, "hurst"));
  const auto grid = FineGrid::from_step(parse_real(kv, "horizon"), parse_real(kv, "step"));
  const auto path = generate_fbm(hurst, grid, seed_of(kv));
  write_data(inv, kv, {}, out, [&](std::ostream& o) {
    o << "t,value\n";
    for (std::size_t j = 0; j < path.values.size(); ++j)
      fmt::print(o, "{},{}\n", format_real(grid.time(j)), format_real(path.values[j]));
  });
}

void run_sde(const Invocation& inv, const KeyValues& kv, std::ostream& out, std::ostream& err) {
  SimulationSpec spec;
  spec.theta = parse_real(kv, "theta");
  spec.hurst = HurstParam(parse_real(kv, "hurst"));
  spec.hurst.require_long_memory();
  spec.obs_n = static_cast<int>(parse_integer(kv, "n"));
  spec.refinement = static_cast<int>(parse_integer(kv, "refinement"));
  spec.seed = seed_of(kv);
  spec.x0 = parse_real(kv, "x0");
  spec.clock = parse_driver_clock(kv.at("driver_clock"));
  const auto model = CoefficientModel::parse(kv.at("coeff"));
  const auto check = validate_coefficients(model);
  if (!check.condition_D_ok)
    fmt::print(err, "warning: coefficients violate the non-degeneracy condition (min(|a|,|b|) = {:.3g}{}{})\n",
               check.M_hat, check.a_sign_change ? ", a changes sign" : "", check.b_sign_change ? ", b changes sign" : "");
  const ObservationGrid grid(spec.obs_n);
  const auto obs = downsample(simulate_sde(spec, model), grid);
  write_data(inv, kv, {}, out, [&](std::ostream& o) {
    o << "k,t,x\n";
    for (std::size_t k = 0; k < obs.values.size(); ++k)
      fmt::print(o, "{},{},{}\n", k, format_real(grid.time(k)), format_real(obs.values[k]));
  });
}

void run_estimate(const Invocation& inv, const KeyValues& kv, std::ostream& out, std::ostream& err) {
  const auto obs = read_observations(kv.at("input"));
  const auto model = CoefficientModel::parse(kv.at("coeff"));
  const std::string which = kv.at("estimator");
  if (which != "both") parse_estimator_kind(which);
  const bool want_weighted = which != "simple";
  std::vector<EstimateResult> results;
  KeyValues derived;
  if (want_weighted) {
    if (!kv.contains("hurst")) throw ConfigError("hurst", "required for the weighted estimator");
    const HurstParam hurst(parse_real(kv, "hurst"));
    if (!(hurst.value() > 0.5)) throw ConfigError("hurst", "must lie in (1/2, 1)");
    derived["lambda"] = format_real(0.5 - hurst.value());
    results.push_back(estimate_theta1(obs, model, hurst));
  }
  if (which != "weighted") results.push_back(estimate_theta2(obs, model));
  for (const auto& r : results)
    if (r.warning) fmt::print(err, "warning ({}): {}\n", to_string(r.kind), *r.warning);
  write_data(inv, kv, derived, out, [&](std::ostream& o) {
    o << "estimator,n,value,numerator,denominator\n";
    for (const auto& r : results)
      fmt::print(o, "{},{},{},{},{}\n", to_string(r.kind), r.n, format_real(r.value), format_real(r.numerator),
                 format_real(r.denominator));
  });
}

void run_verify_frac_deriv(const Invocation& inv, const KeyValues& kv, std::ostream& out) {
  const HurstParam hurst(parse_real(kv, "hurst"));
  hurst.require_long_memory();
  const FracOrder alpha = FracOrder::for_hurst(parse_real(kv, "alpha"), hurst);
  const double gamma = parse_real(kv, "gamma");
  const long long paths = parse_integer(kv, "paths");
  if (paths < 1) throw ConfigError("paths", "must be at least 1");
  const auto grid = FineGrid::from_step(parse_real(kv, "horizon"), parse_real(kv, "step"));
  std::vector<FbmPath> ensemble;
  for (long long i = 0; i < paths; ++i)
    ensemble.push_back(generate_fbm(hurst, grid, seed_of(kv), static_cast<std::uint64_t>(i)));
  const auto stat = theorem1_statistic(ensemble, alpha, gamma);
  const auto scaling = theorem1_scaling(ensemble.front(), alpha, gamma);
  write_data(inv, kv, {}, out, [&](std::ostream& o) {
    o << "hurst,alpha,gamma,paths,horizon,step,statistic,pair_count,argmax_t1,argmax_t2,scaling_slope\n";
    fmt::print(o, "{},{},{},{},{},{},{},{},{},{},{}\n", format_real(hurst.value()), format_real(alpha.value()),
               format_real(gamma), paths, format_real(grid.horizon), format_real(grid.step), format_real(stat.value),
               stat.pair_count, format_real(stat.argmax_t1), format_real(stat.argmax_t2), format_real(scaling.slope));
  });
}

void run_experiment_command(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto resolved = resolve_experiment(inv.options);
  resolved.config.threads = inv.threads;
  const auto check = validate_coefficients(resolved.config.model);
  if (!check.condition_D_ok)
    fmt::print(err, "warning: coefficients violate the non-degeneracy condition (min(|a|,|b|) = {:.3g})\n", check.M_hat);
  const auto report = run_experiment(resolved.config);
  for (const auto& c : report.cells)
    if (c.failures > 0)
      fmt::print(err, "warning: H={} n={} {}: {} failed replicates\n", c.hurst, c.n, to_string(c.kind), c.failures);
  if (inv.out.empty()) {
    write_report_csv(report, out);
    if (inv.markdown) write_markdown_table(report, out);
    return;
  }
  std::filesystem::create_directories(inv.out);
  {
    auto f = open_output(inv.out / "report.csv");
    write_report_csv(report, f);
  }
  {
    auto f = open_output(inv.out / "rates.csv");
    write_rates_csv(report, f);
  }
  {
    auto f = open_output(inv.out / "replicates.csv");
    write_replicates_csv(report, f);
  }
  if (inv.markdown) {
    auto f = open_output(inv.out / "table.md");
    write_markdown_table(report, f);
  }
  emit_manifest("experiment", resolved.canonical, resolved.derived, inv.out / "manifest.json");
}

}  // namespace

KeyValues canonicalize(const std::string& subcommand, const KeyValues& options) {
  if (subcommand == "experiment") return resolve_experiment(options).canonical;
  const auto it = command_keys().find(subcommand);
  if (it == command_keys().end()) throw ConfigError("subcommand", fmt::format("unknown subcommand '{}'", subcommand));
  const KeySpec& spec = it->second;
  std::set<std::string> known(spec.required.begin(), spec.required.end());
  for (const auto& [k, v] : spec.defaults) known.insert(k);
  for (const auto& k : optional_keys(subcommand)) known.insert(k);
  for (const auto& [k, v] : options)
    if (!known.contains(k)) throw ConfigError(k, fmt::format("unknown key for '{}'", subcommand));
  std::vector<std::string> missing;
  for (const auto& k : spec.required)
    if (!options.contains(k)) missing.push_back(k);
  if (!missing.empty()) throw ConfigError("", fmt::format("missing required keys: {}", fmt::join(missing, ", ")));
  KeyValues out = spec.defaults;
  for (const auto& [k, v] : options) out[k] = v;
  return out;
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.subcommand == "experiment") {
      run_experiment_command(inv, out, err);
      return kOk;
    }
    Invocation resolved = inv;
    resolved.options = canonicalize(inv.subcommand, inv.options);
    const KeyValues& kv = resolved.options;
    if (inv.subcommand == "fbm") run_fbm(resolved, kv, out);
    else if (inv.subcommand == "sde") run_sde(resolved, kv, out, err);
    else if (inv.subcommand == "estimate") run_estimate(resolved, kv, out, err);
    else run_verify_frac_deriv(resolved, kv, out);
    return kOk;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return kNumericalError;
  } catch (const DomainError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  }
}

int replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out_path, std::ostream& out,
           std::ostream& err) {
  RunManifest manifest;
  try {
    manifest = read_manifest(manifest_path);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  }
  Invocation inv{manifest.subcommand, manifest.config, out_path};
  return run(inv, out, err);
}

}  // namespace fbmdrift::cli
