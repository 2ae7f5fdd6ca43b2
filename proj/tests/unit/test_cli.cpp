#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fbmdrift/cli.h"
#include "fbmdrift/config.h"
#include "fbmdrift/report.h"

using namespace fbmdrift;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fbmdrift_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

// Drops the wall_time_ms column of report.csv.
std::string without_timing(const std::string& csv) {
  std::string out;
  for (const auto& line : lines(csv)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

int run(const std::string& sub, KeyValues options, const fs::path& out_path, std::string* err_text = nullptr,
        std::string* out_text = nullptr) {
  std::ostringstream out, err;
  cli::Invocation inv{sub, std::move(options), out_path};
  inv.threads = 1;
  int code = cli::run(inv, out, err);
  if (err_text) *err_text = err.str();
  if (out_text) *out_text = out.str();
  return code;
}

ExperimentReport one_cell_report() {
  ExperimentConfig c;
  c.theta = 2.0;
  c.hurst_list = {HurstParam(0.7)};
  c.n_list = {2};
  c.replicates = 3;
  c.estimators = {EstimatorKind::simple};
  c.threads = 1;
  return run_experiment(c);
}

}  // namespace

TEST_CASE("report with one cell", "[report]") {
  std::ostringstream out;
  write_report_csv(one_cell_report(), out);
  auto rows = lines(out.str());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "H,n,estimator,mean_rel_error,median_rel_error,failures,wall_time_ms");
  CHECK_THAT(rows[1], Catch::Matchers::StartsWith("0.69999999999999996,2,simple,"));
}

TEST_CASE("report CSV round trip keeps every digit", "[report]") {
  auto report = one_cell_report();
  std::ostringstream out;
  write_report_csv(report, out);
  std::istringstream in(out.str());
  auto rows = read_report_csv(in);
  REQUIRE(rows.size() == 1);
  const auto& cell = report.cells[0];
  CHECK(rows[0].hurst == cell.hurst);
  CHECK(rows[0].n == cell.n);
  CHECK(rows[0].estimator == "simple");
  CHECK(rows[0].mean_rel_error == cell.mean_rel_error);
  CHECK(rows[0].median_rel_error == cell.median_rel_error);
  CHECK(rows[0].failures == cell.failures);
  CHECK(rows[0].wall_time_ms == cell.wall_time_ms);
}

TEST_CASE("markdown table shape", "[report]") {
  ExperimentConfig c;
  c.theta = 2.0;
  c.hurst_list = {HurstParam(0.6), HurstParam(0.7), HurstParam(0.8), HurstParam(0.9)};
  c.n_list = {3, 4, 5, 6};
  c.replicates = 2;
  c.threads = 1;
  std::ostringstream out;
  write_markdown_table(run_experiment(c), out);
  auto rows = lines(out.str());
  REQUIRE(rows.size() == 6);  // header, separator, n = 3..6
  for (const auto& row : rows) CHECK(std::count(row.begin(), row.end(), '|') == 10);  // n + 8 error columns
  CHECK_THAT(rows[0], ContainsSubstring("H=0.6 δ(1)"));
  CHECK_THAT(rows[0], ContainsSubstring("H=0.9 δ(2)"));
  CHECK_THAT(rows[2], Catch::Matchers::StartsWith("| 3 |"));
  CHECK_THAT(rows[5], Catch::Matchers::StartsWith("| 6 |"));
}

TEST_CASE("manifest round trip", "[report]") {
  TempDir tmp;
  RunManifest m{"sde", {{"theta", "2"}, {"coeff", "builtin:tame"}}, {{"lambda", "-0.2"}}, 7, tool_version(), utc_timestamp()};
  write_manifest(m, tmp.path / "m.json");
  auto back = read_manifest(tmp.path / "m.json");
  CHECK(back.subcommand == "sde");
  CHECK(back.config == m.config);
  CHECK(back.derived == m.derived);
  CHECK(back.seed == 7);
  CHECK(back.timestamp == m.timestamp);
  CHECK(m.timestamp.back() == 'Z');
}

TEST_CASE("data goes to stdout without --out", "[cli]") {
  std::string err, out;
  CHECK(run("fbm", {{"hurst", "0.7"}, {"horizon", "1"}, {"step", "0.25"}}, {}, &err, &out) == cli::kOk);
  auto rows = lines(out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "t,value");
  CHECK(rows[1] == "0,0");
  CHECK(err.empty());
}

TEST_CASE("exit codes", "[cli]") {
  TempDir tmp;
  std::string err;
  CHECK(run("fbm", {{"hurst", "0.7"}}, {}, &err) == cli::kConfigError);
  CHECK_THAT(err, ContainsSubstring("missing required keys: horizon, step"));
  CHECK(run("fbm", {{"hurst", "0.7"}, {"horizon", "1"}, {"step", "0.25"}, {"colour", "red"}}, {}, &err) ==
        cli::kConfigError);
  CHECK_THAT(err, ContainsSubstring("colour"));
  CHECK(run("sde", {{"theta", "2"}, {"hurst", "0.4"}, {"n", "2"}, {"coeff", "builtin:tame"}}, {}, &err) ==
        cli::kConfigError);
  CHECK(run("sde", {{"theta", "2"}, {"hurst", "0.7"}, {"n", "2"}, {"coeff", "2*sin(x;1"}}, {}, &err) ==
        cli::kConfigError);
  CHECK(run("experiment", {}, tmp.path / "exp", &err) == cli::kConfigError);
  CHECK_THAT(err, ContainsSubstring("theta, coeff, hurst, n"));

  // Observations whose state hits a zero of b: numerical failure.
  auto obs = tmp.path / "obs.csv";
  REQUIRE(run("sde", {{"theta", "1"}, {"hurst", "0.7"}, {"n", "1"}, {"coeff", "builtin:drift_only"}}, obs) == cli::kOk);
  CHECK(run("estimate", {{"input", obs.string()}, {"coeff", "1;x"}, {"estimator", "simple"}}, {}, &err) ==
        cli::kNumericalError);
  CHECK_THAT(err, ContainsSubstring("numerical error"));
  // Euler blow-up.
  CHECK(run("sde", {{"theta", "50"}, {"hurst", "0.7"}, {"n", "2"}, {"coeff", "exp(x)*exp(x);1"}}, {}, &err) ==
        cli::kNumericalError);
}

TEST_CASE("sde and estimate pipeline", "[cli]") {
  TempDir tmp;
  auto obs = tmp.path / "obs.csv";
  REQUIRE(run("sde", {{"theta", "2"}, {"hurst", "0.7"}, {"n", "3"}, {"coeff", "builtin:tame"}, {"seed", "4"}}, obs) ==
          cli::kOk);
  CHECK(fs::exists(fs::path(obs.string() + ".manifest.json")));
  CHECK(lines(slurp(obs)).size() == 66);
  auto est = tmp.path / "est.csv";
  REQUIRE(run("estimate", {{"input", obs.string()}, {"coeff", "builtin:tame"}, {"hurst", "0.7"}}, est) == cli::kOk);
  auto rows = lines(slurp(est));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "estimator,n,value,numerator,denominator");
  CHECK_THAT(rows[1], Catch::Matchers::StartsWith("weighted,3,"));
  CHECK_THAT(rows[2], Catch::Matchers::StartsWith("simple,3,"));
  auto manifest = read_manifest(fs::path(est.string() + ".manifest.json"));
  CHECK(manifest.derived.at("lambda") == format_real(0.5 - 0.7));

  std::string err;
  CHECK(run("estimate", {{"input", obs.string()}, {"coeff", "builtin:tame"}}, {}, &err) == cli::kConfigError);
  CHECK_THAT(err, ContainsSubstring("hurst"));
}

TEST_CASE("replaying a manifest reproduces the outputs", "[cli]") {
  TempDir tmp;
  std::ostringstream out, err;
  SECTION("single-file commands") {
    auto first = tmp.path / "a.csv";
    REQUIRE(run("sde", {{"theta", "2"}, {"hurst", "0.8"}, {"n", "2"}, {"coeff", "builtin:near_zero"}, {"seed", "3"},
                        {"driver_clock", "unit"}},
                first) == cli::kOk);
    auto second = tmp.path / "b.csv";
    REQUIRE(cli::replay(first.string() + ".manifest.json", second, out, err) == cli::kOk);
    CHECK(slurp(first) == slurp(second));

    auto v1 = tmp.path / "v1.csv";
    REQUIRE(run("verify-frac-deriv", {{"hurst", "0.7"}, {"alpha", "0.35"}, {"gamma", "0.6"}, {"paths", "3"}}, v1) ==
            cli::kOk);
    auto v2 = tmp.path / "v2.csv";
    REQUIRE(cli::replay(v1.string() + ".manifest.json", v2, out, err) == cli::kOk);
    CHECK(slurp(v1) == slurp(v2));
  }
  SECTION("experiment directory") {
    auto kv = parse_key_values("theta = 2\ncoeff = \"builtin:tame\"\nhurst = [0.6, 0.8]\nn = [2, 3, 4]\nreplicates = 3\n");
    auto d1 = tmp.path / "run1";
    cli::Invocation inv{"experiment", kv, d1, true, 2};
    REQUIRE(cli::run(inv, out, err) == cli::kOk);
    for (const char* f : {"report.csv", "rates.csv", "replicates.csv", "table.md", "manifest.json"})
      CHECK(fs::exists(d1 / f));
    auto d2 = tmp.path / "run2";
    REQUIRE(cli::replay(d1 / "manifest.json", d2, out, err) == cli::kOk);
    CHECK(without_timing(slurp(d1 / "report.csv")) == without_timing(slurp(d2 / "report.csv")));
    CHECK(slurp(d1 / "rates.csv") == slurp(d2 / "rates.csv"));
    CHECK(slurp(d1 / "replicates.csv") == slurp(d2 / "replicates.csv"));
    auto m1 = read_manifest(d1 / "manifest.json"), m2 = read_manifest(d2 / "manifest.json");
    CHECK(m1.config == m2.config);
    CHECK(m1.config.at("replicates") == "3");
    CHECK(m1.config.at("refinement") == "8");
  }
}
