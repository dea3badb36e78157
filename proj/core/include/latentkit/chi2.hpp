#pragma once

namespace latentkit {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly so that tiny tails keep their relative accuracy.
double gamma_q(double a, double x);

/// P(chi^2_df > x).
double chi2_sf(double x, double df);

}  // namespace latentkit
