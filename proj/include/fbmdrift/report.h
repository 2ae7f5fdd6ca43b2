#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbmdrift/config.h"
#include "fbmdrift/experiment.h"

namespace fbmdrift {

/// H,n,estimator,mean_rel_error,median_rel_error,failures,wall_time_ms
void write_report_csv(const ExperimentReport& report, std::ostream& out);
/// H,estimator,slope,intercept
void write_rates_csv(const ExperimentReport& report, std::ostream& out);
/// H,n,estimator,replicate,estimate,rel_error
void write_replicates_csv(const ExperimentReport& report, std::ostream& out);
/// Rows indexed by n, one column per (H, estimator), errors rounded to 3 decimals.
void write_markdown_table(const ExperimentReport& report, std::ostream& out);

struct ReportRow {
  double hurst = 0.0;
  int n = 0;
  std::string estimator;
  double mean_rel_error = 0.0;
  double median_rel_error = 0.0;
  std::size_t failures = 0;
  double wall_time_ms = 0.0;
};

/// Parses the output of write_report_csv.
std::vector<ReportRow> read_report_csv(std::istream& in);

struct RunManifest {
  std::string subcommand;
  KeyValues config;   // canonical inputs; replaying them reproduces the outputs
  KeyValues derived;  // informational only
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC
};

std::string tool_version();
std::string utc_timestamp();

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace fbmdrift
