#include "fbmdrift/coefficients.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "fbmdrift/errors.h"

namespace fbmdrift {

namespace {

struct BuiltinSpec {
  const char* name;
  const char* a;
  const char* b;
  double K;
  double L;
  std::optional<double> M;
};

constexpr double kSqrt8 = 2.0 * std::numbers::sqrt2;

const std::vector<BuiltinSpec>& builtins() {
  static const std::vector<BuiltinSpec> table = {
      {"tame", "2*sin(x)+3", "2*cos(x)+3", 6.0 + kSqrt8, kSqrt8, 1.0},
      {"near_zero", "2*sin(x)+2.1", "2*cos(x)+2.1", 4.2 + kSqrt8, kSqrt8, 0.1},
      {"a_sign_change", "2*cos(x)+1", "2*sin(x)+3", 8.0, kSqrt8, std::nullopt},
      {"b_sign_change", "2*cos(x)+3", "2*sin(x)+1", 8.0, kSqrt8, std::nullopt},
      {"unit", "1", "1", 2.0, 0.0, 1.0},
      // b == 0 is a testing hook: the SDE degenerates to an ODE.
      {"drift_only", "1", "0", 1.0, 0.0, std::nullopt},
      // b == 2^-1000: noise vanishes below rounding while b^-1 stays exact.
      {"noise_suppressed", "1", "9.332636185032189e-302", 1.0 + 9.332636185032189e-302, 0.0, 9.332636185032189e-302},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

CoefficientModel CoefficientModel::from_expressions(std::string_view a_text, std::string_view b_text, std::string label) {
  CoefficientModel model{std::move(label), Expression::parse(trim(a_text)), Expression::parse(trim(b_text)), 0.0, 0.0,
                         std::nullopt, 1.0};
  const auto report = validate_coefficients(model);
  model.K = report.K_hat;
  model.L = report.L_hat;
  if (report.condition_D_ok) model.M = report.M_hat;
  return model;
}

CoefficientModel CoefficientModel::builtin(std::string_view name) {
  for (const auto& spec : builtins()) {
    if (name == spec.name)
      return CoefficientModel{spec.name, Expression::parse(spec.a), Expression::parse(spec.b), spec.K, spec.L, spec.M, 1.0};
  }
  throw ConfigError("coeff", fmt::format("unknown builtin coefficient model '{}' (known: {})", name,
                                         fmt::join(builtin_names(), ", ")));
}

std::vector<std::string> CoefficientModel::builtin_names() {
  std::vector<std::string> names;
  for (const auto& spec : builtins()) names.emplace_back(spec.name);
  return names;
}

CoefficientModel CoefficientModel::parse(std::string_view spec) {
  spec = trim(spec);
  constexpr std::string_view prefix = "builtin:";
  if (spec.starts_with(prefix)) return builtin(trim(spec.substr(prefix.size())));
  const auto sep = spec.find(';');
  if (sep == std::string_view::npos)
    throw ConfigError("coeff", fmt::format("expected \"builtin:<name>\" or \"<a-expr>;<b-expr>\", got \"{}\"", spec));
  try {
    return from_expressions(spec.substr(0, sep), spec.substr(sep + 1));
  } catch (const ConfigError& e) {
    throw ConfigError("coeff", e.what());
  }
}

std::string CoefficientModel::spec() const {
  for (const auto& b_spec : builtins()) {
    if (label == b_spec.name && a.text() == b_spec.a && b.text() == b_spec.b) return fmt::format("builtin:{}", label);
  }
  return fmt::format("{};{}", a.text(), b.text());
}

ValidationReport validate_coefficients(const CoefficientModel& model, const Probe& probe) {
  if (!(probe.hi > probe.lo) || probe.count < 2) throw DomainError("probe interval must be nonempty with at least 2 points");
  ValidationReport r;
  r.M_hat = std::numeric_limits<double>::infinity();
  const double h = (probe.hi - probe.lo) / static_cast<double>(probe.count - 1);
  double prev_a = 0.0, prev_b = 0.0;
  int sign_a = 0, sign_b = 0;
  auto track_sign = [](double v, int& sign, bool& changed) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0 || (sign != 0 && s != sign)) changed = true;
    if (s != 0) sign = s;
  };
  for (std::size_t i = 0; i < probe.count; ++i) {
    const double x = probe.lo + static_cast<double>(i) * h;
    const double av = model.a(x);
    const double bv = model.b(x);
    r.K_hat = std::max(r.K_hat, std::abs(av) + std::abs(bv));
    r.M_hat = std::min(r.M_hat, std::min(std::abs(av), std::abs(bv)));
    track_sign(av, sign_a, r.a_sign_change);
    track_sign(bv, sign_b, r.b_sign_change);
    if (i > 0) r.L_hat = std::max(r.L_hat, (std::abs(av - prev_a) + std::abs(bv - prev_b)) / h);
    prev_a = av;
    prev_b = bv;
  }
  r.condition_D_ok = r.M_hat > 0.0 && !r.a_sign_change && !r.b_sign_change;
  constexpr double slack = 1e-9;
  r.within_declared = r.K_hat <= model.K * (1.0 + slack) + slack && r.L_hat <= model.L * (1.0 + slack) + slack &&
                      (!model.M || r.M_hat >= *model.M * (1.0 - slack));
  return r;
}

}  // namespace fbmdrift
