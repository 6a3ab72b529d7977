#pragma once

// The four study copulas in standard exponential margins, with their
// closed-form gauge functions and tail-dependence measures used as truth.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "limitset/bezier.hpp"

namespace limitset {

enum class CopulaFamily { Gaussian, Logistic, InvertedLogistic, AsymmetricLogistic };

std::string_view to_string(CopulaFamily family);

/// Parses "gaussian", "logistic", "inverted_logistic" / "inv-logistic",
/// "asymmetric_logistic" / "asy-logistic" (case-insensitive).
CopulaFamily parse_family(std::string_view name);

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::Gaussian;
  /// rho in [0,1) for Gaussian, gamma in (0,1) otherwise.
  double dependence = 0.5;
  /// Asymmetry weights (theta1, theta2) in (0,1]; AsymmetricLogistic only.
  std::pair<double, double> asymmetry{0.5, 0.5};

  /// Throws DomainError when the dependence or asymmetry is out of range.
  void validate() const;
};

/// n draws with standard exponential margins, reproducible from seed.
std::vector<Point2> sample(const CopulaSpec& spec, std::size_t n, std::uint64_t seed);

/// Closed-form gauge g(x) of the family.
double analytic_gauge(const CopulaSpec& spec, const Point2& x);

struct AnalyticMeasures {
  double eta = 0.0;
  std::vector<double> lambda;
  std::vector<double> tau1;
};

double analytic_eta(const CopulaSpec& spec);
double analytic_lambda(const CopulaSpec& spec, double omega);
/// tau1 = tau2 for all four families (they are exchangeable).
double analytic_tau1(const CopulaSpec& spec, double delta);

AnalyticMeasures analytic_measures(const CopulaSpec& spec, std::span<const double> omega_grid,
                                   std::span<const double> delta_grid);

}  // namespace limitset
