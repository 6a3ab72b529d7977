#pragma once

// Tail-dependence measures read off a spline boundary, and their posterior
// aggregation.
//
// With G star-shaped and g homogeneous, every measure reduces to maximizing
// a piecewise function over the boundary:
//   eta        = max_q min(q1, q2)
//   lambda(w)  = 1 / max_q min(q1 / w, q2 / (1 - w))
//   tau1(d)    = max { q1 : q2 <= d q1 }
// Maxima sit at knots, interior coordinate extrema, or crossings of the
// relevant ray, all of which are closed-form for quadratic segments.

#include <cstddef>
#include <span>
#include <vector>

#include "limitset/bezier.hpp"

namespace limitset {

double eta(const GaugeSpline& spline);
double lambda(const GaugeSpline& spline, double omega);
double tau1(const GaugeSpline& spline, double delta);
double tau2(const GaugeSpline& spline, double delta);

/// True when the boundary reaches the corner (1,1), i.e. p21 = 1 or p42 = 1.
bool asymptotically_dependent(const GaugeSpline& spline);

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_grid();

struct DependenceSummary {
  double eta = 0.0;
  std::vector<double> lambda;
  std::vector<double> tau1;
  std::vector<double> tau2;
  bool ad_indicator = false;
};

DependenceSummary summarize(const GaugeSpline& spline, std::span<const double> omega_grid,
                            std::span<const double> delta_grid);

/// Lower central order statistic (element ceil(n/2) of the sorted values).
double lower_median(std::vector<double> values);

/// Order statistic at index ceil(q n) (1-based), clamped to [1, n].
double order_quantile(std::vector<double> values, double q);

struct PosteriorSummary {
  std::vector<double> omega_grid;
  std::vector<double> delta_grid;
  std::vector<double> angle_grid;

  std::vector<DependenceSummary> per_draw;

  double eta_median = 0.0;
  double eta_lower = 0.0;  ///< 2.5% order statistic
  double eta_upper = 0.0;  ///< 97.5% order statistic
  double prob_ad = 0.0;    ///< fraction of draws with eta = 1
  std::vector<double> lambda_median;
  std::vector<double> tau1_median;
  std::vector<double> tau2_median;
  /// Pointwise median over draws of the boundary radius on angle_grid.
  std::vector<double> boundary_radius_median;
};

/// Per-draw measures plus pointwise posterior aggregates.
/// Throws DomainError for an empty draw set.
PosteriorSummary posterior_summary(std::span<const GaugeSpline> draws,
                                   std::span<const double> omega_grid,
                                   std::span<const double> delta_grid,
                                   std::size_t n_angles = 101);

}  // namespace limitset
