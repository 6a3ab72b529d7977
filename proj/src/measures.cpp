#include "limitset/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

constexpr double kConeSlack = 1e-12;

template <typename F>
double best_over(const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b,
                 F&& objective) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& q : a) best = std::max(best, objective(q));
  for (const auto& q : b) best = std::max(best, objective(q));
  return best;
}

double eta_with(const GaugeSpline& s, const std::vector<BoundaryPoint>& extrema) {
  return best_over(extrema, ray_crossings(s, 0.5),
                   [](const BoundaryPoint& q) { return std::min(q.x, q.y); });
}

double lambda_with(const GaugeSpline& s, const std::vector<BoundaryPoint>& extrema,
                   double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("omega must lie in [0,1]");
  // At the end points the region is a half-plane; its critical scale is the
  // largest single coordinate on the boundary, which is 1.
  if (omega == 0.0 || omega == 1.0) return 1.0;
  const double best = best_over(extrema, ray_crossings(s, omega), [&](const BoundaryPoint& q) {
    return std::min(q.x / omega, q.y / (1.0 - omega));
  });
  if (!(best > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / best;
}

double tau1_with(const GaugeSpline& s, const std::vector<BoundaryPoint>& extrema, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("delta must lie in [0,1]");
  const double best = best_over(extrema, ray_crossings(s, 1.0 / (1.0 + delta)),
                                [&](const BoundaryPoint& q) {
                                  if (q.y > delta * q.x + kConeSlack) {
                                    return -std::numeric_limits<double>::infinity();
                                  }
                                  return q.x;
                                });
  return std::max(best, 0.0);
}

}  // namespace

double eta(const GaugeSpline& spline) { return eta_with(spline, coordinate_extrema(spline)); }

double lambda(const GaugeSpline& spline, double omega) {
  return lambda_with(spline, coordinate_extrema(spline), omega);
}

double tau1(const GaugeSpline& spline, double delta) {
  return tau1_with(spline, coordinate_extrema(spline), delta);
}

double tau2(const GaugeSpline& spline, double delta) { return tau1(spline.mirrored(), delta); }

bool asymptotically_dependent(const GaugeSpline& spline) {
  return spline.params().p21() == 1.0 || spline.params().p42() == 1.0;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  g.reserve(99);
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

DependenceSummary summarize(const GaugeSpline& spline, std::span<const double> omega_grid,
                            std::span<const double> delta_grid) {
  const auto extrema = coordinate_extrema(spline);
  const GaugeSpline mirror = spline.mirrored();
  const auto mirror_extrema = coordinate_extrema(mirror);

  DependenceSummary d;
  d.eta = eta_with(spline, extrema);
  d.ad_indicator = asymptotically_dependent(spline);
  d.lambda.reserve(omega_grid.size());
  for (double w : omega_grid) d.lambda.push_back(lambda_with(spline, extrema, w));
  d.tau1.reserve(delta_grid.size());
  d.tau2.reserve(delta_grid.size());
  for (double x : delta_grid) {
    d.tau1.push_back(tau1_with(spline, extrema, x));
    d.tau2.push_back(tau1_with(mirror, mirror_extrema, x));
  }
  return d;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  const std::size_t k = (values.size() + 1) / 2;  // ceil(n/2), 1-based
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   values.end());
  return values[k - 1];
}

double order_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   values.end());
  return values[k - 1];
}

PosteriorSummary posterior_summary(std::span<const GaugeSpline> draws,
                                   std::span<const double> omega_grid,
                                   std::span<const double> delta_grid, std::size_t n_angles) {
  if (draws.empty()) throw DomainError("posterior summary needs at least one draw");
  PosteriorSummary out;
  out.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  out.delta_grid.assign(delta_grid.begin(), delta_grid.end());
  for (std::size_t i = 0; i < n_angles; ++i) {
    out.angle_grid.push_back(n_angles == 1 ? 0.5
                                           : static_cast<double>(i) /
                                                 static_cast<double>(n_angles - 1));
  }

  const std::size_t n = draws.size();
  out.per_draw.reserve(n);
  std::vector<double> etas(n);
  std::vector<std::vector<double>> radius(n_angles, std::vector<double>(n));
  std::size_t ad = 0;
  for (std::size_t d = 0; d < n; ++d) {
    out.per_draw.push_back(summarize(draws[d], omega_grid, delta_grid));
    etas[d] = out.per_draw.back().eta;
    if (out.per_draw.back().ad_indicator) ++ad;
    for (std::size_t a = 0; a < n_angles; ++a) {
      radius[a][d] = ray_boundary_point(draws[d], out.angle_grid[a]).radius();
    }
  }

  out.eta_median = lower_median(etas);
  out.eta_lower = order_quantile(etas, 0.025);
  out.eta_upper = order_quantile(etas, 0.975);
  out.prob_ad = static_cast<double>(ad) / static_cast<double>(n);

  auto column_median = [&](auto member, std::size_t len) {
    std::vector<double> med(len);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < len; ++j) {
      for (std::size_t d = 0; d < n; ++d) col[d] = (out.per_draw[d].*member)[j];
      med[j] = lower_median(col);
    }
    return med;
  };
  out.lambda_median = column_median(&DependenceSummary::lambda, omega_grid.size());
  out.tau1_median = column_median(&DependenceSummary::tau1, delta_grid.size());
  out.tau2_median = column_median(&DependenceSummary::tau2, delta_grid.size());
  out.boundary_radius_median.reserve(n_angles);
  for (auto& col : radius) out.boundary_radius_median.push_back(lower_median(std::move(col)));
  return out;
}

}  // namespace limitset
