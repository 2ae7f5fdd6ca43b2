#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fbmdrift/experiment.h"

namespace fbmdrift {

/// Flat key -> raw value map. Keys inside a `[section]` are prefixed with
/// `section.`; values keep their source text minus surrounding quotes.
using KeyValues = std::map<std::string, std::string>;

/// Grammar (one entry per line):
///   # comment            ; comment
///   [section]
///   key = value          value: number | "string" | bare-word | [v1, v2, ...]
/// Duplicate keys and malformed lines throw ConfigError with the line number.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

/// Renders `kv` in the grammar above, one `key = value` per line, sorted.
std::string format_key_values(const KeyValues& kv);

double parse_real(const KeyValues& kv, const std::string& key);
long long parse_integer(const KeyValues& kv, const std::string& key);
std::vector<double> parse_real_list(const KeyValues& kv, const std::string& key);
std::vector<long long> parse_integer_list(const KeyValues& kv, const std::string& key);

/// Full-precision decimal form (17 significant digits).
std::string format_real(double x);
std::string format_real_list(const std::vector<double>& xs);

struct ResolvedExperiment {
  KeyValues canonical;  // every key with defaults applied, canonical spelling
  KeyValues derived;    // informational values (e.g. lambda = 1/2 - H)
  ExperimentConfig config;
};

/// Keys: theta, coeff | coeff.a + coeff.b (+ coeff.label), hurst, n,
/// replicates (20), refinement (8), seed (0), x0 (0), estimator
/// (both | weighted | simple), driver_clock (horizon | unit).
/// Unknown keys, missing required keys and out-of-range values throw
/// ConfigError naming the key.
ResolvedExperiment resolve_experiment(const KeyValues& kv);

}  // namespace fbmdrift
