#include "limitset/likelihood.hpp"

#include <cmath>
#include <limits>

#include "limitset/errors.hpp"
#include "limitset/special.hpp"

namespace limitset {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogMinSurvivor = std::log(kMinSurvivor);

void fill_gauge(const GaugeSpline& spline, const std::vector<double>& w,
                std::vector<double>& out) {
  out.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = gauge_at_angle(spline, w[i]);
}

}  // namespace

double truncated_gamma_core(double alpha, double gauge, double r, double r0) {
  if (!(gauge > 0.0) || !std::isfinite(gauge)) return kNegInf;
  const double log_surv = log_gamma_q(alpha, gauge * r0);
  if (!(log_surv >= kLogMinSurvivor)) return kNegInf;
  const double v = alpha * std::log(gauge) - r * gauge - log_surv;
  return std::isfinite(v) ? v : kNegInf;
}

ExceedanceSet::ExceedanceSet(const PolarSample& sample) {
  for (const auto& rec : sample.records) {
    if (!rec.exceed) continue;
    r_.push_back(rec.r);
    w_.push_back(rec.w);
    r0_.push_back(rec.r0);
    sum_log_r_ += std::log(rec.r);
  }
  if (r_.empty()) throw DomainError("likelihood needs at least one exceedance");
}

double log_likelihood(const GaugeSpline& spline, double alpha, const ExceedanceSet& data) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) return kNegInf;
  const auto& r = data.radii();
  const auto& w = data.angles();
  const auto& r0 = data.thresholds();
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = truncated_gamma_core(alpha, gauge_at_angle(spline, w[i]), r[i], r0[i]);
    if (t == kNegInf) return kNegInf;
    sum += t;
  }
  const double n = static_cast<double>(data.size());
  const double v = sum - n * log_gamma(alpha) + (alpha - 1.0) * data.sum_log_radius();
  return std::isfinite(v) ? v : kNegInf;
}

double log_likelihood(const GaugeSpline& spline, double alpha, const PolarSample& exceedances) {
  return log_likelihood(spline, alpha, ExceedanceSet(exceedances));
}

LikelihoodState::LikelihoodState(const ExceedanceSet& data, const GaugeSpline& spline,
                                 double alpha)
    : data_(&data), spline_(spline), alpha_(alpha) {
  if (!(alpha > 0.0)) throw DomainError("Gamma shape alpha must be positive");
  fill_gauge(spline_, data.angles(), gauge_);
  terms_.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    terms_[i] = truncated_gamma_core(alpha_, gauge_[i], data.radii()[i], data.thresholds()[i]);
  }
  value_ = assemble(alpha_, terms_);
}

double LikelihoodState::assemble(double alpha, const std::vector<double>& terms) const {
  double sum = 0.0;
  for (double t : terms) {
    if (t == kNegInf) return kNegInf;
    sum += t;
  }
  const double n = static_cast<double>(terms.size());
  const double v = sum - n * log_gamma(alpha) + (alpha - 1.0) * data_->sum_log_radius();
  return std::isfinite(v) ? v : kNegInf;
}

double LikelihoodState::propose_spline(const GaugeSpline& spline) {
  pending_spline_ = spline;
  pending_alpha_ = alpha_;
  fill_gauge(spline, data_->angles(), pending_gauge_);
  pending_terms_.resize(terms_.size());
  const auto& r = data_->radii();
  const auto& r0 = data_->thresholds();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    pending_terms_[i] = pending_gauge_[i] == gauge_[i]
                            ? terms_[i]
                            : truncated_gamma_core(alpha_, pending_gauge_[i], r[i], r0[i]);
  }
  pending_value_ = assemble(alpha_, pending_terms_);
  has_pending_ = true;
  return pending_value_;
}

double LikelihoodState::propose_alpha(double alpha) {
  pending_spline_.reset();
  pending_alpha_ = alpha;
  pending_gauge_ = gauge_;
  pending_terms_.resize(terms_.size());
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    pending_value_ = kNegInf;
    has_pending_ = true;
    return pending_value_;
  }
  const auto& r = data_->radii();
  const auto& r0 = data_->thresholds();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    pending_terms_[i] = truncated_gamma_core(alpha, gauge_[i], r[i], r0[i]);
  }
  pending_value_ = assemble(alpha, pending_terms_);
  has_pending_ = true;
  return pending_value_;
}

void LikelihoodState::commit() {
  if (!has_pending_) return;
  if (pending_spline_) spline_ = *pending_spline_;
  alpha_ = pending_alpha_;
  gauge_.swap(pending_gauge_);
  terms_.swap(pending_terms_);
  value_ = pending_value_;
  has_pending_ = false;
  pending_spline_.reset();
}

}  // namespace limitset
