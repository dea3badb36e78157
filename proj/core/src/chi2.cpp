#include "latentkit/chi2.hpp"

#include <cmath>
#include <limits>

#include "latentkit/error.hpp"

namespace latentkit {
namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series for P(a, x), valid for x < a + 1.
double series_p(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double fraction_q(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check(double a, double x) {
  if (!(a > 0.0) || std::isnan(x)) fail(ErrorCode::InvalidArgument, "incomplete gamma needs a > 0");
}

}  // namespace

double gamma_p(double a, double x) {
  check(a, x);
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? series_p(a, x) : 1.0 - fraction_q(a, x);
}

double gamma_q(double a, double x) {
  check(a, x);
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - series_p(a, x) : fraction_q(a, x);
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) fail(ErrorCode::InvalidArgument, "chi-square needs df > 0");
  return gamma_q(df / 2.0, x / 2.0);
}

}  // namespace latentkit
