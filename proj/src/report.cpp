#include "fbmdrift/report.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "fbmdrift/errors.h"

#ifndef FBMDRIFT_VERSION
#define FBMDRIFT_VERSION "0.0.0"
#endif

namespace fbmdrift {

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "H,n,estimator,mean_rel_error,median_rel_error,failures,wall_time_ms\n";
  for (const auto& c : report.cells) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", format_real(c.hurst), c.n, to_string(c.kind), format_real(c.mean_rel_error),
               format_real(c.median_rel_error), c.failures, format_real(c.wall_time_ms));
  }
}

void write_rates_csv(const ExperimentReport& report, std::ostream& out) {
  out << "H,estimator,slope,intercept\n";
  for (const auto& r : report.rate_fits)
    fmt::print(out, "{},{},{},{}\n", format_real(r.hurst), to_string(r.kind), format_real(r.fit.slope), format_real(r.fit.intercept));
}

void write_replicates_csv(const ExperimentReport& report, std::ostream& out) {
  out << "H,n,estimator,replicate,estimate,rel_error\n";
  for (const auto& c : report.cells)
    for (std::size_t r = 0; r < c.estimates.size(); ++r)
      fmt::print(out, "{},{},{},{},{},{}\n", format_real(c.hurst), c.n, to_string(c.kind), r, format_real(c.estimates[r]),
                 format_real(c.rel_errors[r]));
}

void write_markdown_table(const ExperimentReport& report, std::ostream& out) {
  std::vector<double> hs;
  std::vector<int> ns;
  std::vector<EstimatorKind> kinds;
  auto add_unique = [](auto& v, auto x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& c : report.cells) {
    add_unique(hs, c.hurst);
    add_unique(ns, c.n);
    add_unique(kinds, c.kind);
  }
  out << "| n |";
  for (double h : hs)
    for (EstimatorKind k : kinds) fmt::print(out, " H={} δ{} |", h, k == EstimatorKind::weighted ? "(1)" : "(2)");
  out << "\n|---|";
  for (std::size_t i = 0; i < hs.size() * kinds.size(); ++i) out << "---|";
  out << "\n";
  for (int n : ns) {
    fmt::print(out, "| {} |", n);
    for (double h : hs)
      for (EstimatorKind k : kinds) fmt::print(out, " {:.3f} |", report.cell(h, n, k).mean_rel_error);
    out << "\n";
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "H,n,estimator,mean_rel_error,median_rel_error,failures,wall_time_ms")
    throw ConfigError("report", "unexpected report.csv header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw ConfigError("report", fmt::format("malformed row '{}'", line));
    rows.push_back(ReportRow{std::stod(f[0]), std::stoi(f[1]), f[2], std::stod(f[3]), std::stod(f[4]),
                             static_cast<std::size_t>(std::stoull(f[5])), std::stod(f[6])});
  }
  return rows;
}

std::string tool_version() { return FBMDRIFT_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["config"] = manifest.config;
  if (!manifest.derived.empty()) j["derived"] = manifest.derived;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["timestamp"] = manifest.timestamp;
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write manifest '{}'", path.string()));
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("manifest", fmt::format("cannot read '{}'", path.string()));
  try {
    const auto j = nlohmann::json::parse(in);
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config").get<KeyValues>();
    if (j.contains("derived")) m.derived = j.at("derived").get<KeyValues>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
}

}  // namespace fbmdrift
