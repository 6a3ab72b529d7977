#include "limitset/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

constexpr double kRootSlack = 1e-12;
constexpr double kLinearCoef = 1e-14;
constexpr double kZeroCoef = 1e-14;

Point2 bernstein(const Point2& a, const Point2& b, const Point2& c, double t) {
  const double s = 1.0 - t;
  const double w0 = s * s;
  const double w1 = 2.0 * t * s;
  const double w2 = t * t;
  return {w0 * a.x + w1 * b.x + w2 * c.x, w0 * a.y + w1 * b.y + w2 * c.y};
}

// Roots in [0,1] (after clamping) of the quadratic in Bernstein form with
// coefficients fa, fb, fc. Returns the number written to out.
int bernstein_roots(double fa, double fb, double fc, std::array<double, 2>& out) {
  const double a = fa - 2.0 * fb + fc;
  const double b = 2.0 * (fb - fa);
  const double c = fa;
  int count = 0;
  auto keep = [&](double t) {
    if (t >= -kRootSlack && t <= 1.0 + kRootSlack) {
      out[count++] = std::clamp(t, 0.0, 1.0);
    }
  };
  // An end point on the ray is an exact root; deflate it so the remaining
  // root does not inherit the sqrt error of a near-double root.
  if (fa == 0.0 || fc == 0.0) {
    const double lin_den = fa == 0.0 ? 2.0 * fb - fc : fa - 2.0 * fb;
    keep(fa == 0.0 ? 0.0 : 1.0);
    if (lin_den != 0.0) {
      const double t = fa == 0.0 ? 2.0 * fb / lin_den : fa / lin_den;
      if (count == 0 || t != out[0]) keep(t);
    }
    return count;
  }
  if (std::abs(a) < kLinearCoef) {
    if (b != 0.0) keep(-c / b);
    return count;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // tangency lost to rounding
    if (disc < -1e-14 * (b * b + std::abs(4.0 * a * c))) return 0;
    disc = 0.0;
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) {
    keep(0.0);
    return count;
  }
  keep(q / a);
  const double other = c / q;
  if (count == 0 || other != out[0]) keep(other);
  return count;
}

// Intersections of one segment with the ray through (w, 1-w), appended to out.
void segment_crossings(const std::array<Point2, 3>& cp, int segment, double w,
                       std::vector<BoundaryPoint>& out) {
  const double v = 1.0 - w;
  const double fa = cp[0].y * w - cp[0].x * v;
  const double fb = cp[1].y * w - cp[1].x * v;
  const double fc = cp[2].y * w - cp[2].x * v;
  auto push = [&](double t) {
    const Point2 p = bernstein(cp[0], cp[1], cp[2], t);
    out.push_back({p.x, p.y, segment, t});
  };

  if (std::abs(fa) <= kZeroCoef && std::abs(fb) <= kZeroCoef &&
      std::abs(fc) <= kZeroCoef) {
    // Segment lies on the ray (or collapsed onto a point of it).
    push(0.0);
    push(1.0);
    const double ra = cp[0].x + cp[0].y;
    const double rb = cp[1].x + cp[1].y;
    const double rc = cp[2].x + cp[2].y;
    const double den = ra - 2.0 * rb + rc;
    if (den != 0.0) {
      const double t = (ra - rb) / den;
      if (t > 0.0 && t < 1.0) push(t);
    }
    return;
  }

  std::array<double, 2> roots{};
  const int n = bernstein_roots(fa, fb, fc, roots);
  for (int i = 0; i < n; ++i) push(roots[i]);
}

void check_angle(double w) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw DomainError("angle must lie in [0,1]");
  }
}

}  // namespace

Point2 eval_curve(const Point2& p0, const Point2& p1, const Point2& p2, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("curve parameter t must lie in [0,1]");
  }
  return bernstein(p0, p1, p2, t);
}

SplineParams logistic_shape_params(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("logistic dependence must lie in (0,1]");
  }
  const double mid = 0.5 * (1.0 + gamma);
  return SplineParams{{gamma, 0.5, mid, 1.0, 1.0, 1.0, mid, 0.5, gamma}};
}

bool satisfies_constraints(const SplineParams& p) {
  for (double v : p.values) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  // Slopes are compared cross-multiplied so points on an axis stay well defined.
  return p.p11() <= p.p21() && p.p12() * p.p21() >= p.p11() &&
         p.p42() * p.p51() >= p.p52() && p.p42() >= p.p52() &&
         p.p31() >= std::min(p.p21(), p.p42());
}

std::vector<std::string> check_constraints(const SplineParams& p) {
  std::vector<std::string> out;
  for (double v : p.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      out.emplace_back(kRangeViolation);
      return out;
    }
  }
  if (!(p.p11() <= p.p21())) out.emplace_back(kP11LeP21);
  if (!(p.p12() * p.p21() >= p.p11())) out.emplace_back(kSlopeP1P2);
  if (!(p.p42() * p.p51() >= p.p52())) out.emplace_back(kSlopeP4P5);
  if (!(p.p42() >= p.p52())) out.emplace_back(kP42GeP52);
  if (!(p.p31() >= std::min(p.p21(), p.p42()))) out.emplace_back(kP31GeMin);
  return out;
}

GaugeSpline::GaugeSpline(const SplineParams& p) : params_(p) {
  points_ = {Point2{0.0, p.p02()},       Point2{p.p11(), p.p12()},
             Point2{p.p21(), 1.0},       Point2{p.p31(), p.p31()},
             Point2{1.0, p.p42()},       Point2{p.p51(), p.p52()},
             Point2{p.p61(), 0.0}};
  angle_p2_ = p.p21() / (p.p21() + 1.0);
  angle_p4_ = 1.0 / (1.0 + p.p42());
}

SplineBuild build_spline(const SplineParams& params) {
  SplineBuild result;
  result.violations = check_constraints(params);
  if (result.violations.empty()) result.spline.emplace(GaugeSpline(params));
  return result;
}

GaugeSpline GaugeSpline::from_params(const SplineParams& params) {
  SplineBuild b = build_spline(params);
  if (!b) {
    std::ostringstream msg;
    msg << "invalid spline parameters:";
    for (const auto& v : b.violations) msg << " [" << v << "]";
    throw std::invalid_argument(msg.str());
  }
  return *b.spline;
}

std::array<Point2, 3> GaugeSpline::segment(int index) const {
  if (index < 1 || index > 3) throw DomainError("segment index must be 1, 2 or 3");
  const auto k = static_cast<std::size_t>(2 * (index - 1));
  return {points_[k], points_[k + 1], points_[k + 2]};
}

Point2 GaugeSpline::at(int seg, double t) const {
  const auto cp = segment(seg);
  return eval_curve(cp[0], cp[1], cp[2], t);
}

GaugeSpline GaugeSpline::mirrored() const {
  SplineParams m;
  std::reverse_copy(params_.values.begin(), params_.values.end(), m.values.begin());
  return GaugeSpline(m);
}

std::vector<BoundaryPoint> ray_crossings(const GaugeSpline& spline, double w) {
  check_angle(w);
  std::vector<BoundaryPoint> out;
  out.reserve(6);
  for (int s = 1; s <= 3; ++s) segment_crossings(spline.segment(s), s, w, out);
  return out;
}

BoundaryPoint ray_boundary_point(const GaugeSpline& spline, double w) {
  const auto hits = ray_crossings(spline, w);
  if (hits.empty()) {
    std::ostringstream msg;
    msg << "ray at angle " << w << " does not meet the spline boundary";
    throw GeometryError(msg.str(), w);
  }
  return *std::max_element(hits.begin(), hits.end(),
                           [](const BoundaryPoint& a, const BoundaryPoint& b) {
                             return a.radius() < b.radius();
                           });
}

double gauge_at_angle(const GaugeSpline& spline, double w) {
  check_angle(w);
  const int seg = w <= spline.knot_angle_top()     ? 1
                  : w >= spline.knot_angle_right() ? 3
                                                   : 2;
  const auto& pts = spline.points();
  const auto k = static_cast<std::size_t>(2 * (seg - 1));
  const Point2& a = pts[k];
  const Point2& b = pts[k + 1];
  const Point2& c = pts[k + 2];
  const double v = 1.0 - w;
  const double fa = a.y * w - a.x * v;
  const double fb = b.y * w - b.x * v;
  const double fc = c.y * w - c.x * v;

  double best = 0.0;
  if (!(std::abs(fa) <= kZeroCoef && std::abs(fb) <= kZeroCoef &&
        std::abs(fc) <= kZeroCoef)) {
    std::array<double, 2> roots{};
    const int n = bernstein_roots(fa, fb, fc, roots);
    for (int i = 0; i < n; ++i) {
      const Point2 p = bernstein(a, b, c, roots[i]);
      best = std::max(best, p.x + p.y);
    }
  }
  if (best <= 0.0) best = ray_boundary_point(spline, w).radius();
  if (best <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / best;
}

double gauge_value(const GaugeSpline& spline, const Point2& x) {
  if (!(x.x >= 0.0 && x.y >= 0.0)) {
    throw DomainError("gauge arguments must be nonnegative");
  }
  const double r = x.x + x.y;
  if (!(r > 0.0)) throw DomainError("gauge is undefined at the origin");
  const double rb = ray_boundary_point(spline, x.x / r).radius();
  if (rb <= 0.0) return std::numeric_limits<double>::infinity();
  return r / rb;
}

std::vector<BoundaryPoint> coordinate_extrema(const GaugeSpline& spline) {
  const auto& p = spline.points();
  std::vector<BoundaryPoint> out{
      {p[0].x, p[0].y, 1, 0.0},
      {p[2].x, p[2].y, 1, 1.0},
      {p[4].x, p[4].y, 2, 1.0},
      {p[6].x, p[6].y, 3, 1.0},
  };
  for (int s = 1; s <= 3; ++s) {
    const auto cp = spline.segment(s);
    auto stationary = [&](double a, double b, double c) {
      const double den = a - 2.0 * b + c;
      if (den == 0.0) return;
      const double t = (a - b) / den;
      if (t > 0.0 && t < 1.0) {
        const Point2 q = bernstein(cp[0], cp[1], cp[2], t);
        out.push_back({q.x, q.y, s, t});
      }
    };
    stationary(cp[0].x, cp[1].x, cp[2].x);
    stationary(cp[0].y, cp[1].y, cp[2].y);
  }
  return out;
}

}  // namespace limitset
