// fbmdrift: simulate fBm-driven SDEs and estimate their drift parameter.
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbmdrift/cli.h"
#include "fbmdrift/config.h"
#include "fbmdrift/errors.h"

namespace {

using fbmdrift::KeyValues;

// Registers string-valued flags; only flags given on the command line end up
// in the option map, so defaults live in one place (the library).
struct FlagSet {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& key, const std::string& help, bool required = false) {
    std::string name = "--";
    for (char c : key) name += (c == '_' ? '-' : c);
    auto* opt = app->add_option(name, values[key], help);
    if (required) opt->required();
    options.emplace_back(key, opt);
  }

  KeyValues given() const {
    KeyValues kv;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) kv[key] = values.at(key);
    return kv;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift estimation for SDEs driven by fractional Brownian motion"};
  app.require_subcommand(1);
  std::string out;

  auto* fbm = app.add_subcommand("fbm", "Sample a fractional Brownian motion path (CSV t,value)");
  FlagSet fbm_flags;
  fbm_flags.add(fbm, "hurst", "Hurst parameter in (0,1)");
  fbm_flags.add(fbm, "horizon", "Time horizon");
  fbm_flags.add(fbm, "step", "Grid step (horizon must be a multiple)");
  fbm_flags.add(fbm, "seed", "Random seed");
  fbm->add_option("--out", out, "Output CSV (stdout if omitted)");

  auto* sde = app.add_subcommand("sde", "Simulate dX = theta a(X) dt + b(X) dB^H and write observations (CSV k,t,x)");
  FlagSet sde_flags;
  for (const char* key : {"theta", "hurst", "n", "refinement", "seed", "x0", "driver_clock"})
    sde_flags.add(sde, key, key);
  sde_flags.add(sde, "coeff", "\"<a-expr>;<b-expr>\" or builtin:<name>");
  sde->add_option("--out", out, "Output CSV (stdout if omitted)");

  auto* estimate = app.add_subcommand("estimate", "Estimate theta from an observation CSV (k,t,x)");
  FlagSet est_flags;
  est_flags.add(estimate, "input", "Observation CSV");
  est_flags.add(estimate, "coeff", "\"<a-expr>;<b-expr>\" or builtin:<name>");
  est_flags.add(estimate, "hurst", "Hurst parameter (weighted estimator only)");
  est_flags.add(estimate, "estimator", "weighted | simple | both");
  estimate->add_option("--out", out, "Output CSV (stdout if omitted)");

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo relative-error experiment");
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  bool markdown = false;
  experiment->add_option("--config", config_path, "Key-value config file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--set", overrides, "Override a config entry, key=value (repeatable)");
  FlagSet exp_flags;
  exp_flags.add(experiment, "seed", "Override the base seed");
  exp_flags.add(experiment, "replicates", "Override the replicate count");
  experiment->add_option("--threads", threads, "Worker threads (0: FBMDRIFT_THREADS or all cores)");
  experiment->add_option("--out-dir", out, "Output directory (report.csv to stdout if omitted)");
  experiment->add_flag("--markdown", markdown, "Also write table.md");

  auto* verify = app.add_subcommand("verify", "Diagnostics");
  verify->require_subcommand(1);
  auto* frac = verify->add_subcommand("frac-deriv", "Fractional-derivative ratio statistic of fBm paths");
  FlagSet frac_flags;
  for (const char* key : {"hurst", "alpha", "gamma", "paths", "horizon", "step", "seed"}) frac_flags.add(frac, key, key);
  frac->add_option("--out", out, "Output CSV (stdout if omitted)");

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest;
  replay->add_option("--manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out, "Output file or directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fbmdrift::cli::kConfigError;
  }

  namespace cli = fbmdrift::cli;
  if (replay->parsed()) return cli::replay(manifest, out, std::cout, std::cerr);

  cli::Invocation inv;
  inv.out = out;
  if (fbm->parsed()) {
    inv.subcommand = "fbm";
    inv.options = fbm_flags.given();
  } else if (sde->parsed()) {
    inv.subcommand = "sde";
    inv.options = sde_flags.given();
  } else if (estimate->parsed()) {
    inv.subcommand = "estimate";
    inv.options = est_flags.given();
  } else if (frac->parsed()) {
    inv.subcommand = "verify-frac-deriv";
    inv.options = frac_flags.given();
  } else {
    inv.subcommand = "experiment";
    inv.markdown = markdown;
    inv.threads = threads;
    try {
      inv.options = fbmdrift::read_key_values(config_path);
      for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw fbmdrift::ConfigError(item, "--set expects key=value");
        inv.options[item.substr(0, eq)] = item.substr(eq + 1);
      }
      for (const auto& [key, value] : exp_flags.given()) inv.options[key] = value;
    } catch (const fbmdrift::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return cli::kConfigError;
    }
  }
  return cli::run(inv, std::cout, std::cerr);
}
