#pragma once

// Constrained quadratic Bezier splines describing the boundary of a
// bivariate limit set inside the unit box.
//
// The boundary is three quadratic curves B1(p0,p1,p2), B2(p2,p3,p4),
// B3(p4,p5,p6) running clockwise from the y-axis to the x-axis. Four
// coordinates are pinned (p0 on the y-axis, p2 on the top edge, p4 on the
// right edge, p6 on the x-axis) and p3 sits on the diagonal, which leaves
// nine free coordinates.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace limitset {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using ControlPoint = Point2;

/// Quadratic Bernstein form (1-t)^2 p0 + 2t(1-t) p1 + t^2 p2.
/// Throws DomainError when t is outside [0, 1].
Point2 eval_curve(const Point2& p0, const Point2& p1, const Point2& p2, double t);

/// Position of each free coordinate inside SplineParams.
enum ParamIndex : std::size_t {
  kP02 = 0,
  kP11,
  kP12,
  kP21,
  kP31,
  kP42,
  kP51,
  kP52,
  kP61,
};

inline constexpr std::size_t kNumSplineParams = 9;

/// The nine free coordinates (p02, p11, p12, p21, p31, p42, p51, p52, p61).
struct SplineParams {
  std::array<double, kNumSplineParams> values{};

  static constexpr std::array<std::string_view, kNumSplineParams> kNames{
      "p02", "p11", "p12", "p21", "p31", "p42", "p51", "p52", "p61"};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double p02() const { return values[kP02]; }
  double p11() const { return values[kP11]; }
  double p12() const { return values[kP12]; }
  double p21() const { return values[kP21]; }
  double p31() const { return values[kP31]; }
  double p42() const { return values[kP42]; }
  double p51() const { return values[kP51]; }
  double p52() const { return values[kP52]; }
  double p61() const { return values[kP61]; }

  friend bool operator==(const SplineParams&, const SplineParams&) = default;
};

/// Piecewise-linear spline reproducing the logistic limit-set boundary with
/// dependence gamma: straight lines (0,gamma)-(1,1)-(gamma,0).
SplineParams logistic_shape_params(double gamma);

// Constraint labels reported by check_constraints.
inline constexpr std::string_view kRangeViolation = "all coordinates in [0,1]";
inline constexpr std::string_view kP11LeP21 = "p₁,₁ ≤ p₂,₁";
inline constexpr std::string_view kSlopeP1P2 = "m(0,p₁) ≥ m(0,p₂)";
inline constexpr std::string_view kSlopeP4P5 = "m(0,p₄) ≥ m(0,p₅)";
inline constexpr std::string_view kP42GeP52 = "p₄,₂ ≥ p₅,₂";
inline constexpr std::string_view kP31GeMin = "p₃,₁ ≥ min(p₂,₁,p₄,₂)";

/// Names of every violated constraint; empty for a valid parameter vector.
std::vector<std::string> check_constraints(const SplineParams& params);

/// Allocation-free form of check_constraints(params).empty().
bool satisfies_constraints(const SplineParams& params);

/// A point on the boundary together with the segment (1..3) and curve
/// parameter it came from.
struct BoundaryPoint {
  double x = 0.0;
  double y = 0.0;
  int segment = 1;
  double t = 0.0;

  /// Sum-norm radius x + y.
  double radius() const { return x + y; }
};

struct SplineBuild;

class GaugeSpline {
 public:
  const SplineParams& params() const { return params_; }
  const std::array<Point2, 7>& points() const { return points_; }

  /// Control points of segment 1..3.
  std::array<Point2, 3> segment(int index) const;

  /// Point on segment 1..3 at parameter t.
  Point2 at(int segment, double t) const;

  /// Angles w = x/(x+y) of the knots p2 and p4; segment 1 spans [0, w(p2)],
  /// segment 3 spans [w(p4), 1].
  double knot_angle_top() const { return angle_p2_; }
  double knot_angle_right() const { return angle_p4_; }

  /// Reflection across the diagonal; the result is again a valid spline.
  GaugeSpline mirrored() const;

  /// Validated construction; throws std::invalid_argument listing the
  /// violated constraints.
  static GaugeSpline from_params(const SplineParams& params);

 private:
  friend SplineBuild build_spline(const SplineParams& params);
  explicit GaugeSpline(const SplineParams& params);

  SplineParams params_;
  std::array<Point2, 7> points_;
  double angle_p2_;
  double angle_p4_;
};

struct SplineBuild {
  std::optional<GaugeSpline> spline;
  std::vector<std::string> violations;

  explicit operator bool() const { return spline.has_value(); }
};

/// Assembles p0..p6 and validates every constraint.
SplineBuild build_spline(const SplineParams& params);

/// Every intersection of the ray through direction (w, 1-w) with the
/// boundary, across all segments. Segments lying on the ray contribute their
/// end points and any radial extremum.
std::vector<BoundaryPoint> ray_crossings(const GaugeSpline& spline, double w);

/// The boundary point on the ray through (w, 1-w). When several segments
/// report a hit the one with the largest radius wins. Returns the origin when
/// the only contact is the origin (p02 = 0 or p61 = 0 near the axes).
/// Throws GeometryError when nothing is found.
BoundaryPoint ray_boundary_point(const GaugeSpline& spline, double w);

/// g(w, 1-w) = 1 / radius of the boundary point. Selects the segment from the
/// knot angles and solves a single quadratic; falls back to the all-segment
/// search near knots. Infinite when the boundary point is the origin.
double gauge_at_angle(const GaugeSpline& spline, double w);

/// g(x) = |x| / |x_boundary| with sum-norm radii. Throws DomainError for the
/// origin or negative coordinates.
double gauge_value(const GaugeSpline& spline, const Point2& x);

/// Knots plus every interior stationary point of the x and y components of
/// each segment.
std::vector<BoundaryPoint> coordinate_extrema(const GaugeSpline& spline);

}  // namespace limitset
