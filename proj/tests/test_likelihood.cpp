#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "limitset/copula.hpp"
#include "limitset/errors.hpp"
#include "limitset/likelihood.hpp"
#include "limitset/special.hpp"

using namespace limitset;

namespace {

PolarSample single_point(double r, double w, double r0) {
  PolarSample s;
  s.records.push_back({r, w, r0, true});
  s.n_total = s.n_exceed = 1;
  return s;
}

// Composite Simpson over [a, b] with n (even) panels.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("hand case: alpha = 1, g = 1, r = 1, no truncation") {
  CHECK(truncated_gamma_core(1.0, 1.0, 1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));

  const auto s = GaugeSpline::from_params(logistic_shape_params(0.5));
  // g(w=0) = 2, alpha = 1, r = 0.5, r0 = 0: log 2 - 1
  CHECK(log_likelihood(s, 1.0, single_point(0.5, 0.0, 0.0)) ==
        doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("single-point value matches the closed form") {
  const auto s = GaugeSpline::from_params(logistic_shape_params(0.3));
  const double w = 0.2, r = 3.0, r0 = 1.5, alpha = 2.5;
  const double g = gauge_at_angle(s, w);
  const double expected = alpha * std::log(g) - std::lgamma(alpha) + (alpha - 1.0) * std::log(r) -
                          r * g - std::log(gamma_q(alpha, g * r0));
  CHECK(log_likelihood(s, alpha, single_point(r, w, r0)) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("truncated density integrates to one") {
  const auto s = GaugeSpline::from_params(logistic_shape_params(0.5));
  for (double alpha : {0.7, 1.0, 2.0, 4.5}) {
    for (double w : {0.1, 0.5, 0.85}) {
      for (double r0 : {0.5, 2.0, 6.0}) {
        const double g = gauge_at_angle(s, w);
        auto density = [&](double r) {
          return std::exp(log_likelihood(s, alpha, single_point(r, w, r0)));
        };
        const double upper = r0 + 80.0 * std::max(1.0, alpha) / g;
        CHECK(std::abs(simpson(density, r0, upper, 200000) - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("impossible states give -inf") {
  CHECK(std::isinf(truncated_gamma_core(2.0, INFINITY, 1.0, 0.5)));
  CHECK(std::isinf(truncated_gamma_core(2.0, 0.0, 1.0, 0.5)));
  // survivor below 1e-300
  CHECK(std::isinf(truncated_gamma_core(1.0, 1.0, 800.0, 700.0)));
  const auto s = GaugeSpline::from_params(logistic_shape_params(0.5));
  CHECK(std::isinf(log_likelihood(s, -1.0, single_point(1.0, 0.5, 0.0))));
  PolarSample none;
  none.records.push_back({1.0, 0.5, 2.0, false});
  CHECK_THROWS_AS(ExceedanceSet{none}, DomainError);
}

TEST_CASE("cached state tracks the direct evaluation") {
  const CopulaSpec spec{CopulaFamily::Gaussian, 0.5, {0.5, 0.5}};
  const auto pts = to_exponential_margins(sample(spec, 2000, 3));
  const ExceedanceSet data(marginal_threshold(pts, 0.75));
  SplineParams p{{0.6, 0.2, 0.8, 0.4, 0.8, 0.5, 0.9, 0.3, 0.7}};
  REQUIRE(satisfies_constraints(p));
  LikelihoodState state(data, GaugeSpline::from_params(p), 1.8);
  CHECK(state.value() == log_likelihood(GaugeSpline::from_params(p), 1.8, data));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> step(0.0, 0.05);
  for (int k = 0; k < 200; ++k) {
    SplineParams q = state.spline().params();
    const std::size_t i = static_cast<std::size_t>(k) % kNumSplineParams;
    q[i] = std::clamp(q[i] + step(rng), 0.0, 1.0);
    if (!satisfies_constraints(q)) continue;
    const auto sq = GaugeSpline::from_params(q);
    const double v = state.propose_spline(sq);
    CHECK(v == log_likelihood(sq, state.alpha(), data));
    if (k % 3 != 0) state.commit();
    if (k % 7 == 0) {
      const double a = state.alpha() * std::exp(step(rng));
      CHECK(state.propose_alpha(a) == log_likelihood(state.spline(), a, data));
      state.commit();
    }
  }
  CHECK(state.value() == log_likelihood(state.spline(), state.alpha(), data));
}
