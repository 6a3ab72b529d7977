#include "limitset/tail_prep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // positions i..j-1 (0-based) share the mean 1-based rank
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0,1)");
}

}  // namespace

PolarSample PolarSample::exceedances() const {
  PolarSample out;
  out.tau = tau;
  out.n_total = n_total;
  for (const auto& rec : records) {
    if (rec.exceed) out.records.push_back(rec);
  }
  out.n_exceed = out.records.size();
  return out;
}

std::vector<Point2> to_exponential_margins(std::span<const Point2> data) {
  const std::size_t n = data.size();
  if (n < 2) throw DomainError("rank transform needs at least two observations");
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = data[i].x;
    b[i] = data[i].y;
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double denom = static_cast<double>(n) + 1.0;
  std::vector<Point2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {-std::log1p(-ra[i] / denom), -std::log1p(-rb[i] / denom)};
  }
  return out;
}

PolarSample to_pseudo_polar(std::span<const Point2> points) {
  PolarSample s;
  s.n_total = points.size();
  s.records.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.x >= 0.0 && p.y >= 0.0)) throw DomainError("pseudo-polar coordinates need nonnegative points");
    const double r = p.x + p.y;
    if (!(r > 0.0)) throw DomainError("pseudo-polar coordinates are undefined at the origin");
    s.records.push_back({r, p.x / r, 0.0, false});
  }
  return s;
}

double empirical_quantile(std::span<const double> values, double tau) {
  check_tau(tau);
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  const auto n = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::ceil(tau * n));
  k = std::clamp<std::size_t>(k, 1, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

double MarginalQuantiles::radial_threshold(double w) const {
  if (w <= breakpoint()) return q2 / (1.0 - w);
  return q1 / w;
}

MarginalQuantiles marginal_quantiles(std::span<const Point2> points, double tau) {
  check_tau(tau);
  std::vector<double> a, b;
  a.reserve(points.size());
  b.reserve(points.size());
  for (const auto& p : points) {
    a.push_back(p.x);
    b.push_back(p.y);
  }
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (points.empty() || constant(a) || constant(b)) {
    throw DomainError("degenerate margin: zero variance");
  }
  return {empirical_quantile(a, tau), empirical_quantile(b, tau)};
}

PolarSample marginal_threshold(std::span<const Point2> points, double tau) {
  const MarginalQuantiles q = marginal_quantiles(points, tau);
  PolarSample s = to_pseudo_polar(points);
  s.tau = tau;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& rec = s.records[i];
    rec.r0 = q.radial_threshold(rec.w);
    // Decided on the margins directly: r > r0(w) is the same event, but the
    // division in r0 can misplace points tied with a quantile by one ulp.
    rec.exceed = points[i].x > q.q1 || points[i].y > q.q2;
    if (rec.exceed) ++s.n_exceed;
  }
  return s;
}

PolarSample oracle_threshold(std::span<const Point2> points, double tau,
                             const std::function<double(double)>& gauge_at_angle,
                             std::size_t n_target) {
  check_tau(tau);
  const std::size_t n = points.size();
  if (n_target < 1 || n_target > n) throw DomainError("n_target must lie in [1, n]");
  PolarSample s = to_pseudo_polar(points);
  s.tau = tau;
  std::vector<double> g(n), score(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = gauge_at_angle(s.records[i].w);
    score[i] = s.records[i].r * g[i];
  }
  std::vector<double> sorted = score;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double kth = sorted[n_target - 1];
  const double next = n_target < n ? sorted[n_target] : 0.0;
  const double c0 = 0.5 * (kth + next);
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = s.records[i];
    rec.r0 = c0 / g[i];
    rec.exceed = rec.r > rec.r0;
    if (rec.exceed) ++s.n_exceed;
  }
  return s;
}

}  // namespace limitset
