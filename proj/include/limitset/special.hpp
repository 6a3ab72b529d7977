#pragma once

namespace limitset {

/// log Gamma(a) for a > 0.
double log_gamma(double a);

/// Regularized lower incomplete gamma P(a, x).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// log Q(a, x), evaluated without forming Q when the continued fraction
/// branch applies, so it stays finite far into the tail.
double log_gamma_q(double a, double x);

/// CDF of a Gamma(shape, rate) variable at x. Throws DomainError for
/// non-finite or out-of-range inputs.
double gamma_cdf(double x, double shape, double rate);

}  // namespace limitset
