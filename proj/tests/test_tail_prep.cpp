#include <doctest.h>

#include <cmath>
#include <random>

#include "limitset/copula.hpp"
#include "limitset/errors.hpp"
#include "limitset/tail_prep.hpp"

using namespace limitset;

TEST_CASE("rank transform with ties") {
  const std::vector<Point2> data{{3.0, 1.0}, {1.0, 1.0}, {2.0, 5.0}, {2.0, 0.0}};
  const auto e = to_exponential_margins(data);
  // first margin ranks 4, 1, 2.5, 2.5; n + 1 = 5
  CHECK(e[0].x == doctest::Approx(-std::log1p(-4.0 / 5.0)));
  CHECK(e[1].x == doctest::Approx(-std::log1p(-1.0 / 5.0)));
  CHECK(e[2].x == doctest::Approx(-std::log1p(-2.5 / 5.0)));
  CHECK(e[3].x == e[2].x);
  // second margin ranks 2.5, 2.5, 4, 1
  CHECK(e[0].y == e[1].y);
  CHECK(e[0].y == doctest::Approx(-std::log1p(-2.5 / 5.0)));
  CHECK_THROWS_AS(to_exponential_margins(std::vector<Point2>{{1.0, 1.0}}), DomainError);
}

TEST_CASE("pseudo-polar coordinates") {
  const std::vector<Point2> pts{{1.0, 3.0}, {2.0, 0.0}};
  const auto s = to_pseudo_polar(pts);
  CHECK(s.records[0].r == 4.0);
  CHECK(s.records[0].w == 0.25);
  CHECK(s.records[1].w == 1.0);
  CHECK_THROWS_AS(to_pseudo_polar(std::vector<Point2>{{0.0, 0.0}}), DomainError);
}

TEST_CASE("empirical quantile is the ceil(tau n) order statistic") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(empirical_quantile(v, 0.75) == 4.0);  // ceil(3.75) = 4
  CHECK(empirical_quantile(v, 0.2) == 1.0);
  CHECK(empirical_quantile(v, 0.21) == 2.0);
  CHECK_THROWS_AS(empirical_quantile(v, 1.0), DomainError);
}

TEST_CASE("marginal threshold keeps points above either quantile") {
  const auto pts = to_exponential_margins(
      sample({CopulaFamily::Gaussian, 0.5, {0.5, 0.5}}, 3000, 4));
  const auto q = marginal_quantiles(pts, 0.75);
  const auto s = marginal_threshold(pts, 0.75);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool above = pts[i].x > q.q1 || pts[i].y > q.q2;
    expected += above;
    CHECK(s.records[i].exceed == above);
    if (std::abs(s.records[i].r - s.records[i].r0) > 1e-9 * s.records[i].r) {
      CHECK(s.records[i].exceed == (s.records[i].r > s.records[i].r0));
    }
  }
  CHECK(s.n_exceed == expected);
  CHECK(s.exceedances().records.size() == expected);
  // continuity of r0 at the breakpoint
  const double b = q.breakpoint();
  CHECK(q.radial_threshold(b) == doctest::Approx(q.radial_threshold(b + 1e-12)));
  CHECK(q.radial_threshold(0.0) == doctest::Approx(q.q2));
  CHECK(q.radial_threshold(1.0) == doctest::Approx(q.q1));
}

TEST_CASE("constant margin is rejected") {
  const std::vector<Point2> pts{{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}};
  CHECK_THROWS_AS(marginal_threshold(pts, 0.75), DomainError);
}

TEST_CASE("oracle threshold keeps exactly n_target points") {
  const CopulaSpec spec{CopulaFamily::InvertedLogistic, 0.5, {0.5, 0.5}};
  const auto pts = to_exponential_margins(sample(spec, 2000, 12));
  auto gauge = [&](double w) { return analytic_gauge(spec, {w, 1.0 - w}); };
  for (std::size_t target : {1u, 300u, 731u, 2000u}) {
    const auto s = oracle_threshold(pts, 0.75, gauge, target);
    CHECK(s.n_exceed == target);
    // r0 g(w) is the same constant for every record
    const double c0 = s.records[0].r0 * gauge(s.records[0].w);
    CHECK(s.records[17].r0 * gauge(s.records[17].w) == doctest::Approx(c0));
  }
  CHECK_THROWS_AS(oracle_threshold(pts, 0.75, gauge, 0), DomainError);
}
