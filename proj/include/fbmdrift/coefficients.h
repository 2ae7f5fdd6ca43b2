#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbmdrift/expression.h"

namespace fbmdrift {

/// Drift a(.) and diffusion b(.) of dX = theta a(X) dt + b(X) dB^H together
/// with their declared regularity constants:
///   (A) |a| + |b| <= K,  (B) |a(x)-a(y)| + |b(x)-b(y)| <= L |x-y|,
///   (C) b' locally delta-Holder (recorded only),
///   (D) |a|, |b| >= M > 0 (absent when the model violates it).
struct CoefficientModel {
  std::string label;
  Expression a;
  Expression b;
  double K = 0.0;
  double L = 0.0;
  std::optional<double> M;
  double delta = 1.0;

  /// Constants are estimated by validate_coefficients on the default probe.
  static CoefficientModel from_expressions(std::string_view a_text, std::string_view b_text,
                                           std::string label = "custom");

  /// Accepts "builtin:<name>" or "<a-expr>;<b-expr>".
  static CoefficientModel parse(std::string_view spec);

  static CoefficientModel builtin(std::string_view name);
  static std::vector<std::string> builtin_names();

  /// Canonical text accepted by `parse`.
  std::string spec() const;
};

struct Probe {
  double lo = -20.0;
  double hi = 20.0;
  std::size_t count = 100'001;
};

struct ValidationReport {
  double K_hat = 0.0;
  double L_hat = 0.0;
  double M_hat = 0.0;
  bool a_sign_change = false;
  bool b_sign_change = false;
  bool condition_D_ok = false;
  /// K_hat <= K and L_hat <= L (and M_hat >= M when M is declared).
  bool within_declared = false;
};

/// Probes the model on a uniform grid. Never throws on pathological models.
ValidationReport validate_coefficients(const CoefficientModel& model, const Probe& probe = {});

}  // namespace fbmdrift
