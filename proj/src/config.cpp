#include "fbmdrift/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "fbmdrift/errors.h"

namespace fbmdrift {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s, int line) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'')) {
    if (s.back() != s.front()) throw ConfigError("", fmt::format("line {}: unterminated string", line));
    return std::string(s.substr(1, s.size() - 2));
  }
  if (!s.empty() && (s.front() == '"' || s.front() == '\''))
    throw ConfigError("", fmt::format("line {}: unterminated string", line));
  return std::string(s);
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' || c == ';') {
      return line.substr(0, i);
    }
  }
  return line;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

double to_real(std::string_view text, const std::string& key) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
    throw ConfigError(key, fmt::format("expected a number, got '{}'", text));
  return v;
}

long long to_integer(std::string_view text, const std::string& key) {
  text = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, fmt::format("expected an integer, got '{}'", text));
  return v;
}

std::vector<std::string_view> list_items(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    return {text};  // a scalar is a one-element list
  }
  text = trim(text.substr(1, text.size() - 2));
  std::vector<std::string_view> items;
  if (text.empty()) throw ConfigError(key, "list must not be empty");
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    items.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

const std::string& require(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(key, "missing value");
  return it->second;
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') throw ConfigError("", fmt::format("line {}: malformed section header", line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!valid_key(section)) throw ConfigError("", fmt::format("line {}: invalid section name", line_no));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", fmt::format("line {}: expected 'key = value'", line_no));
    const std::string_view raw_key = trim(line.substr(0, eq));
    if (!valid_key(raw_key)) throw ConfigError("", fmt::format("line {}: invalid key '{}'", line_no, raw_key));
    const std::string key = section.empty() ? std::string(raw_key) : section + "." + std::string(raw_key);
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key, fmt::format("line {}: empty value", line_no));
    if (!kv.emplace(key, unquote(value, line_no)).second)
      throw ConfigError(key, fmt::format("line {}: duplicate key", line_no));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [key, value] : kv) {
    const bool bare = !value.empty() && (value.front() == '[' ||
                                         std::all_of(value.begin(), value.end(), [](char c) {
                                           return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                                                  c == '+' || c == '_';
                                         }));
    out += bare ? fmt::format("{} = {}\n", key, value) : fmt::format("{} = \"{}\"\n", key, value);
  }
  return out;
}

double parse_real(const KeyValues& kv, const std::string& key) { return to_real(require(kv, key), key); }
long long parse_integer(const KeyValues& kv, const std::string& key) { return to_integer(require(kv, key), key); }

std::vector<double> parse_real_list(const KeyValues& kv, const std::string& key) {
  std::vector<double> out;
  for (auto item : list_items(require(kv, key), key)) out.push_back(to_real(item, key));
  return out;
}

std::vector<long long> parse_integer_list(const KeyValues& kv, const std::string& key) {
  std::vector<long long> out;
  for (auto item : list_items(require(kv, key), key)) out.push_back(to_integer(item, key));
  return out;
}

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

std::string format_real_list(const std::vector<double>& xs) {
  std::vector<std::string> parts;
  for (double x : xs) parts.push_back(format_real(x));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

ResolvedExperiment resolve_experiment(const KeyValues& kv) {
  static const std::set<std::string> known = {"theta", "coeff", "coeff.a", "coeff.b", "coeff.label",
                                              "hurst", "n", "replicates", "refinement", "seed",
                                              "x0", "estimator", "driver_clock"};
  for (const auto& [key, value] : kv)
    if (!known.contains(key)) throw ConfigError(key, "unknown key");

  std::vector<std::string> missing;
  for (const char* key : {"theta", "hurst", "n"})
    if (!kv.contains(key)) missing.emplace_back(key);
  const bool has_coeff = kv.contains("coeff") || kv.contains("coeff.a") || kv.contains("coeff.b");
  if (!has_coeff) missing.insert(missing.begin() + 1, "coeff");
  if (!missing.empty()) throw ConfigError("", fmt::format("missing required keys: {}", fmt::join(missing, ", ")));

  ResolvedExperiment out;
  ExperimentConfig& c = out.config;
  c.theta = parse_real(kv, "theta");

  if (kv.contains("coeff")) {
    if (kv.contains("coeff.a") || kv.contains("coeff.b"))
      throw ConfigError("coeff", "give either coeff or coeff.a/coeff.b, not both");
    c.model = CoefficientModel::parse(require(kv, "coeff"));
    if (kv.contains("coeff.label")) c.model.label = require(kv, "coeff.label");
  } else {
    if (!kv.contains("coeff.a") || !kv.contains("coeff.b")) throw ConfigError(kv.contains("coeff.a") ? "coeff.b" : "coeff.a", "missing value");
    try {
      c.model = CoefficientModel::from_expressions(require(kv, "coeff.a"), require(kv, "coeff.b"),
                                                   kv.contains("coeff.label") ? require(kv, "coeff.label") : "custom");
    } catch (const ConfigError& e) {
      throw ConfigError("coeff.a/coeff.b", e.what());
    }
  }

  c.hurst_list.clear();
  for (double h : parse_real_list(kv, "hurst")) {
    if (!(h > 0.5 && h < 1.0)) throw ConfigError("hurst", fmt::format("{} is outside (1/2, 1) required for estimation", h));
    c.hurst_list.emplace_back(h);
  }
  c.n_list.clear();
  for (long long n : parse_integer_list(kv, "n")) {
    if (n < 1 || n > ObservationGrid::kMaxLevel) throw ConfigError("n", fmt::format("{} is outside [1, {}]", n, ObservationGrid::kMaxLevel));
    c.n_list.push_back(static_cast<int>(n));
  }
  auto integer_or = [&](const std::string& key, long long fallback, long long min) {
    const long long v = kv.contains(key) ? parse_integer(kv, key) : fallback;
    if (v < min) throw ConfigError(key, fmt::format("must be at least {}, got {}", min, v));
    return v;
  };
  c.replicates = static_cast<int>(integer_or("replicates", 20, 1));
  c.refinement = static_cast<int>(integer_or("refinement", 8, 1));
  c.base_seed = static_cast<std::uint64_t>(integer_or("seed", 0, 0));
  c.x0 = kv.contains("x0") ? parse_real(kv, "x0") : 0.0;
  const std::string estimator = kv.contains("estimator") ? require(kv, "estimator") : "both";
  if (estimator == "both") c.estimators = {EstimatorKind::weighted, EstimatorKind::simple};
  else c.estimators = {parse_estimator_kind(estimator)};
  c.clock = kv.contains("driver_clock") ? parse_driver_clock(require(kv, "driver_clock")) : DriverClock::horizon;
  c.validate();

  std::vector<double> hs, lambdas;
  for (const auto& h : c.hurst_list) {
    hs.push_back(h.value());
    lambdas.push_back(0.5 - h.value());
  }
  std::vector<std::string> ns;
  for (int n : c.n_list) ns.push_back(std::to_string(n));
  out.canonical = {
      {"theta", format_real(c.theta)},
      {"coeff", c.model.spec()},
      {"hurst", format_real_list(hs)},
      {"n", fmt::format("[{}]", fmt::join(ns, ", "))},
      {"replicates", std::to_string(c.replicates)},
      {"refinement", std::to_string(c.refinement)},
      {"seed", std::to_string(c.base_seed)},
      {"x0", format_real(c.x0)},
      {"estimator", estimator},
      {"driver_clock", std::string(to_string(c.clock))},
  };
  if (kv.contains("coeff.label")) out.canonical["coeff.label"] = c.model.label;
  if (std::find(c.estimators.begin(), c.estimators.end(), EstimatorKind::weighted) != c.estimators.end())
    out.derived["lambda"] = format_real_list(lambdas);
  return out;
}

}  // namespace fbmdrift
