#pragma once

namespace fbmdrift {

/// Gamma function via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Relative error below 1e-13 on (0, 20].
double lanczos_gamma(double x);

double lanczos_log_gamma(double x);  // x > 0

/// Euler Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b), a, b > 0.
double beta_function(double a, double b);

}  // namespace fbmdrift
