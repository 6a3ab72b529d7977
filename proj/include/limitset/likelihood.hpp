#pragma once

// Truncated-Gamma pseudo-likelihood of exceedance radii given angles:
// R | W = w, R > r0(w) ~ truncGamma(shape alpha, rate g(w, 1-w)).

#include <cstddef>
#include <optional>
#include <vector>

#include "limitset/bezier.hpp"
#include "limitset/tail_prep.hpp"

namespace limitset {

/// Survivor terms below this are treated as an impossible state.
inline constexpr double kMinSurvivor = 1e-300;

/// Log-likelihood contribution of one exceedance, without the shared
/// -log Gamma(alpha) + (alpha-1) log r parts. -inf when not finite.
double truncated_gamma_core(double alpha, double gauge, double r, double r0);

/// Exceedance radii, angles and thresholds in structure-of-arrays form.
class ExceedanceSet {
 public:
  /// Keeps only records with exceed set. Throws DomainError if none remain.
  explicit ExceedanceSet(const PolarSample& sample);

  std::size_t size() const { return r_.size(); }
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& angles() const { return w_; }
  const std::vector<double>& thresholds() const { return r0_; }
  double sum_log_radius() const { return sum_log_r_; }

 private:
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<double> r0_;
  double sum_log_r_ = 0.0;
};

/// Sum over exceedances of
///   alpha log g - log Gamma(alpha) + (alpha-1) log r - r g - log(1 - F(r0; alpha, g)).
/// Returns -inf when any term is not finite. Throws DomainError on an empty set.
double log_likelihood(const GaugeSpline& spline, double alpha, const ExceedanceSet& data);
double log_likelihood(const GaugeSpline& spline, double alpha, const PolarSample& exceedances);

/// Current (alpha, spline) together with per-point gauge values and
/// likelihood terms. Gauge values are recomputed in full on every spline
/// change; per-point terms are reused where the recomputed gauge is
/// bit-identical (points on segments the change did not touch).
class LikelihoodState {
 public:
  LikelihoodState(const ExceedanceSet& data, const GaugeSpline& spline, double alpha);

  double alpha() const { return alpha_; }
  const GaugeSpline& spline() const { return spline_; }
  const std::vector<double>& gauge_cache() const { return gauge_; }
  double value() const { return value_; }

  /// Log-likelihood with the spline replaced; stays pending until commit().
  double propose_spline(const GaugeSpline& spline);
  /// Log-likelihood with alpha replaced; stays pending until commit().
  double propose_alpha(double alpha);
  /// Adopt the last proposal.
  void commit();

 private:
  double assemble(double alpha, const std::vector<double>& terms) const;

  const ExceedanceSet* data_;
  GaugeSpline spline_;
  double alpha_;
  std::vector<double> gauge_;
  std::vector<double> terms_;
  double value_ = 0.0;

  std::optional<GaugeSpline> pending_spline_;
  double pending_alpha_ = 0.0;
  std::vector<double> pending_gauge_;
  std::vector<double> pending_terms_;
  double pending_value_ = 0.0;
  bool has_pending_ = false;
};

}  // namespace limitset
