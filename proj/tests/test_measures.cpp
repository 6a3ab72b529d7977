#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "limitset/errors.hpp"
#include "limitset/measures.hpp"

using namespace limitset;

namespace {

SplineParams random_valid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 9);
  for (;;) {
    SplineParams p;
    for (auto& v : p.values) {
      const int k = pick(rng);
      v = k == 0 ? 0.0 : k == 1 ? 1.0 : u(rng);
    }
    if (satisfies_constraints(p)) return p;
  }
}

// Symmetric spline whose middle segment crosses the diagonal at (c, c).
SplineParams diagonal_crossing_at(double c) {
  const double a = 0.3;
  const double p31 = 2.0 * (c - 0.25 * (1.0 + a));
  return SplineParams{{0.5, 0.1, 0.9, a, p31, a, 0.9, 0.1, 0.5}};
}

// Brute-force maximum of f over a t-grid on every segment.
template <typename F>
double grid_max(const GaugeSpline& s, F&& f, int per_segment) {
  double best = -INFINITY;
  for (int seg = 1; seg <= 3; ++seg) {
    for (int i = 0; i <= per_segment; ++i) {
      best = std::max(best, f(s.at(seg, static_cast<double>(i) / per_segment)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("logistic-shape spline") {
  for (double g : {0.3, 0.5, 0.7}) {
    const auto s = GaugeSpline::from_params(logistic_shape_params(g));
    CHECK(eta(s) == 1.0);
    CHECK(asymptotically_dependent(s));
    for (double w : default_grid()) {
      CHECK(std::abs(lambda(s, w) - std::max(w, 1.0 - w)) <= 1e-10);
    }
  }
  const auto s = GaugeSpline::from_params(logistic_shape_params(0.5));
  CHECK(std::abs(tau1(s, 0.25) - 4.0 / 7.0) <= 1e-10);
  CHECK(std::abs(lambda(s, 0.4) - 0.6) <= 1e-10);
}

TEST_CASE("inverted-logistic diagonal crossing") {
  const double target = std::pow(2.0, -0.5);
  const auto p = diagonal_crossing_at(target);
  REQUIRE(satisfies_constraints(p));
  const auto s = GaugeSpline::from_params(p);
  CHECK(eta(s) == doctest::Approx(target).epsilon(1e-14));
  CHECK_FALSE(asymptotically_dependent(s));
  const double brute = grid_max(s, [](Point2 q) { return std::min(q.x, q.y); }, 200000);
  CHECK(std::abs(brute - target) < 1e-6);
}

TEST_CASE("end points of the measures") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto s = GaugeSpline::from_params(random_valid(rng));
    CHECK(tau1(s, 1.0) == 1.0);
    CHECK(tau2(s, 1.0) == 1.0);
    CHECK(lambda(s, 0.0) == 1.0);
    CHECK(lambda(s, 1.0) == 1.0);
  }
  // only axis points satisfy q2 <= 0
  SplineParams p{{0.6, 0.2, 0.8, 0.4, 0.8, 0.5, 0.9, 0.3, 0.35}};
  REQUIRE(satisfies_constraints(p));
  CHECK(tau1(GaugeSpline::from_params(p), 0.0) == doctest::Approx(0.35));
  CHECK(tau2(GaugeSpline::from_params(p), 0.0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(lambda(GaugeSpline::from_params(p), 1.5), DomainError);
  CHECK_THROWS_AS(tau1(GaugeSpline::from_params(p), -0.1), DomainError);
}

TEST_CASE("identities and bounds on random splines") {
  std::mt19937_64 rng(31);
  const auto grid = default_grid();
  for (int i = 0; i < 300; ++i) {
    const auto s = GaugeSpline::from_params(random_valid(rng));
    const auto d = summarize(s, grid, grid);
    CHECK(std::abs(d.eta - 1.0 / (2.0 * lambda(s, 0.5))) <= 1e-10);
    CHECK(d.eta > 0.0);
    CHECK(d.eta <= 1.0);
    const bool corner = s.params().p21() == 1.0 || s.params().p42() == 1.0;
    CHECK(d.ad_indicator == corner);
    CHECK(corner == (std::abs(d.eta - 1.0) <= 1e-9));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(d.lambda[k] >= std::max(grid[k], 1.0 - grid[k]) - 1e-10);
      if (k > 0) {
        CHECK(d.tau1[k] >= d.tau1[k - 1] - 1e-10);
        CHECK(d.tau2[k] >= d.tau2[k - 1] - 1e-10);
      }
    }
  }
}

TEST_CASE("lambda stays at most one when the ray meets the boundary outside the unit simplex") {
  // lambda(w) <= 1 needs a boundary point with q1 >= w and q2 >= 1 - w,
  // which holds whenever the boundary radius on the ray w is at least 1.
  std::mt19937_64 rng(37);
  for (int i = 0; i < 300; ++i) {
    const auto s = GaugeSpline::from_params(random_valid(rng));
    for (double w : default_grid()) {
      if (ray_boundary_point(s, w).radius() >= 1.0) CHECK(lambda(s, w) <= 1.0 + 1e-10);
    }
  }
  // a boundary hugging the axes dips inside the simplex and exceeds 1
  const SplineParams low{{0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5}};
  REQUIRE(satisfies_constraints(low));
  CHECK(lambda(GaugeSpline::from_params(low), 0.5) > 1.0);
}

TEST_CASE("closed form agrees with a dense grid") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 10; ++i) {
    const auto s = GaugeSpline::from_params(random_valid(rng));
    const int n = 100000;
    // the kink of min() makes the plain grid accurate to O(1/n) only
    const double e = grid_max(s, [](Point2 q) { return std::min(q.x, q.y); }, n);
    CHECK(std::abs(eta(s) - e) < 5e-5);
    CHECK(eta(s) >= e - 1e-12);
    const double w = 0.3;
    const double l = grid_max(s, [&](Point2 q) { return std::min(q.x / w, q.y / (1 - w)); }, n);
    CHECK(std::abs(1.0 / lambda(s, w) - l) < 5e-5);
    const double d = 0.4;
    const double t = grid_max(s, [&](Point2 q) { return q.y <= d * q.x ? q.x : -INFINITY; }, n);
    CHECK(tau1(s, d) >= t - 1e-12);
    CHECK(std::abs(tau1(s, d) - t) < 5e-5);
  }
}

TEST_CASE("median conventions") {
  CHECK(lower_median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(lower_median({1.0, 0.6, 1.0, 0.6}) == 0.6);
  CHECK(lower_median({1.0, 1.0, 1.0, 0.6}) == 1.0);
  CHECK(order_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.25) == 3.0);
  CHECK_THROWS_AS(lower_median({}), DomainError);
}

TEST_CASE("posterior summary") {
  const auto grid = default_grid();
  const auto ad = GaugeSpline::from_params(logistic_shape_params(0.5));
  const auto ai = GaugeSpline::from_params(diagonal_crossing_at(0.6));

  const std::vector<GaugeSpline> same(5, ai);
  const auto s1 = posterior_summary(same, grid, grid);
  const auto single = summarize(ai, grid, grid);
  CHECK(s1.eta_median == single.eta);
  CHECK(s1.eta_lower == single.eta);
  CHECK(s1.prob_ad == 0.0);
  CHECK(s1.lambda_median == single.lambda);
  CHECK(s1.tau1_median == single.tau1);
  CHECK(s1.tau2_median == single.tau2);
  CHECK(s1.boundary_radius_median[50] == doctest::Approx(1.2));

  const std::vector<GaugeSpline> alt{ad, ai, ad, ai};
  const auto s2 = posterior_summary(alt, grid, grid);
  CHECK(s2.prob_ad == 0.5);
  CHECK(s2.eta_median == doctest::Approx(0.6));
  CHECK(s2.per_draw.size() == 4);

  CHECK_THROWS_AS(posterior_summary(std::vector<GaugeSpline>{}, grid, grid), DomainError);
}
