#include "fbmdrift/special.h"

#include <array>
#include <cmath>
#include <numbers>

#include "fbmdrift/errors.h"

namespace fbmdrift {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Series part A_g(z) for Γ(z + 1) = sqrt(2π) t^{z+1/2} e^{-t} A_g(z), t = z + g + 1/2.
double lanczos_series(double z) {
  double sum = kLanczosCoeff[0];
  for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) sum += kLanczosCoeff[i] / (z + static_cast<double>(i));
  return sum;
}

}  // namespace

double lanczos_gamma(double x) {
  if (x < 0.5) {
    if (x == std::floor(x)) throw DomainError("gamma: pole at non-positive integer");
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_series(z);
}

double lanczos_log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: arguments must be positive");
  return std::exp(lanczos_log_gamma(a) + lanczos_log_gamma(b) - lanczos_log_gamma(a + b));
}

}  // namespace fbmdrift
