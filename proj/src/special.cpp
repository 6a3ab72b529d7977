#include "limitset/special.hpp"

#include <cmath>
#include <limits>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

constexpr int kMaxIter = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Sum of the series x^n / (a (a+1) ... (a+n)), times a.
double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum;
}

// Continued fraction for Gamma(a, x) e^x x^-a (modified Lentz).
double upper_fraction(double a, double x) {
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
  return h;
}

void check_args(double a, double x) {
  if (!std::isfinite(a) || !(a > 0.0)) throw DomainError("gamma shape must be finite and positive");
  if (std::isnan(x) || x < 0.0) throw DomainError("incomplete gamma argument must be nonnegative");
}

}  // namespace

double log_gamma(double a) {
  if (!(a > 0.0)) throw DomainError("log_gamma requires a positive argument");
  return std::lgamma(a);
}

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) return std::exp(log_prefix) * lower_series(a, x);
  return 1.0 - std::exp(log_prefix) * upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) return 1.0 - std::exp(log_prefix) * lower_series(a, x);
  return std::exp(log_prefix) * upper_fraction(a, x);
}

double log_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) return std::log1p(-std::exp(log_prefix) * lower_series(a, x));
  return log_prefix + std::log(upper_fraction(a, x));
}

double gamma_cdf(double x, double shape, double rate) {
  if (!std::isfinite(shape) || !(shape > 0.0)) throw DomainError("gamma shape must be finite and positive");
  if (!std::isfinite(rate) || !(rate > 0.0)) throw DomainError("gamma rate must be finite and positive");
  if (std::isnan(x) || x < 0.0) throw DomainError("gamma_cdf requires x >= 0");
  return gamma_p(shape, rate * x);
}

}  // namespace limitset
