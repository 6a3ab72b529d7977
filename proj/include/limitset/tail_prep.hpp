#pragma once

// Rank transform to exponential margins, pseudo-polar decomposition and
// selection of joint-tail exceedances.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "limitset/bezier.hpp"

namespace limitset {

struct PolarRecord {
  double r = 0.0;   ///< x1 + x2
  double w = 0.0;   ///< x1 / r
  double r0 = 0.0;  ///< radial threshold at angle w
  bool exceed = false;
};

struct PolarSample {
  std::vector<PolarRecord> records;
  double tau = 0.0;
  std::size_t n_total = 0;
  std::size_t n_exceed = 0;

  /// Records with exceed set, in input order.
  PolarSample exceedances() const;
};

/// Per margin, rank k (average rank for ties) maps to -log(1 - k/(n+1)).
/// Throws DomainError when fewer than two observations are given.
std::vector<Point2> to_exponential_margins(std::span<const Point2> data);

/// (r, w) per point; r0 and exceed are left unset.
PolarSample to_pseudo_polar(std::span<const Point2> points);

/// Empirical quantile as the order statistic at index ceil(tau * n).
double empirical_quantile(std::span<const double> values, double tau);

struct MarginalQuantiles {
  double q1 = 0.0;
  double q2 = 0.0;

  /// Radial threshold r0(w): q2/(1-w) up to the breakpoint q1/(q1+q2), q1/w after.
  double radial_threshold(double w) const;
  double breakpoint() const { return q1 / (q1 + q2); }
};

MarginalQuantiles marginal_quantiles(std::span<const Point2> points, double tau);

/// Marginal threshold scheme. A point exceeds when it is above the tau
/// quantile in at least one margin (equivalently r > r0(w)).
/// Throws DomainError for tau outside (0,1) or a constant margin.
PolarSample marginal_threshold(std::span<const Point2> points, double tau);

/// Oracle threshold scheme r0(w) = C0 / g(w, 1-w), with C0 placed between the
/// n_target-th and (n_target+1)-th largest values of r g(w, 1-w) so that
/// exactly n_target points exceed (barring ties).
PolarSample oracle_threshold(std::span<const Point2> points, double tau,
                             const std::function<double(double)>& gauge_at_angle,
                             std::size_t n_target);

}  // namespace limitset
