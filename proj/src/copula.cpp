#include "limitset/copula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

// Exponential quantile of the normal CDF at z, i.e. -log(1 - Phi(z)), with
// both tails computed from erfc to keep relative accuracy.
double normal_to_exponential(double z) {
  if (z < 0.0) {
    const double lower = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    return -std::log1p(-lower);
  }
  return -std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
}

// Unit Frechet value z to standard exponential: -log(1 - exp(-1/z)).
double frechet_to_exponential(double z) { return -std::log(-std::expm1(-1.0 / z)); }

// Positive stable variable with Laplace transform exp(-t^index) (Kanter).
double positive_stable(double index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, std::numbers::pi);
  std::exponential_distribution<double> expo(1.0);
  double u = unif(rng);
  while (u == 0.0) u = unif(rng);
  const double e = expo(rng);
  const double a = std::sin(index * u) / std::pow(std::sin(u), 1.0 / index);
  const double b = std::pow(std::sin((1.0 - index) * u) / e, (1.0 - index) / index);
  return a * b;
}

// Pair of unit Frechet variables from the symmetric logistic max-stable law.
std::pair<double, double> logistic_frechet(double gamma, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  const double s = positive_stable(gamma, rng);
  const double e1 = expo(rng);
  const double e2 = expo(rng);
  return {std::pow(s / e1, gamma), std::pow(s / e2, gamma)};
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

double logistic_gauge(double gamma, const Point2& x) {
  const double hi = std::max(x.x, x.y);
  const double lo = std::min(x.x, x.y);
  return hi / gamma + (1.0 - 1.0 / gamma) * lo;
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Gaussian: return "gaussian";
    case CopulaFamily::Logistic: return "logistic";
    case CopulaFamily::InvertedLogistic: return "inverted_logistic";
    case CopulaFamily::AsymmetricLogistic: return "asymmetric_logistic";
  }
  return "unknown";
}

CopulaFamily parse_family(std::string_view name) {
  const std::string s = lower(name);
  if (s == "gaussian" || s == "normal") return CopulaFamily::Gaussian;
  if (s == "logistic") return CopulaFamily::Logistic;
  if (s == "inverted_logistic" || s == "inv_logistic") return CopulaFamily::InvertedLogistic;
  if (s == "asymmetric_logistic" || s == "asy_logistic") return CopulaFamily::AsymmetricLogistic;
  throw DomainError("unknown copula family: " + std::string(name));
}

void CopulaSpec::validate() const {
  if (family == CopulaFamily::Gaussian) {
    if (!(dependence >= 0.0 && dependence < 1.0)) throw DomainError("Gaussian rho must lie in [0,1)");
    return;
  }
  if (!(dependence > 0.0 && dependence < 1.0)) throw DomainError("logistic-family gamma must lie in (0,1)");
  if (family == CopulaFamily::AsymmetricLogistic) {
    const auto [t1, t2] = asymmetry;
    if (!(t1 > 0.0 && t1 <= 1.0 && t2 > 0.0 && t2 <= 1.0)) {
      throw DomainError("asymmetry weights must lie in (0,1]");
    }
  }
}

std::vector<Point2> sample(const CopulaSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw DomainError("sample size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Point2> out;
  out.reserve(n);
  const double g = spec.dependence;

  switch (spec.family) {
    case CopulaFamily::Gaussian: {
      std::normal_distribution<double> norm(0.0, 1.0);
      const double c = std::sqrt(1.0 - g * g);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = norm(rng);
        const double z2 = g * z1 + c * norm(rng);
        out.push_back({normal_to_exponential(z1), normal_to_exponential(z2)});
      }
      break;
    }
    case CopulaFamily::Logistic:
      for (std::size_t i = 0; i < n; ++i) {
        const auto [z1, z2] = logistic_frechet(g, rng);
        out.push_back({frechet_to_exponential(z1), frechet_to_exponential(z2)});
      }
      break;
    case CopulaFamily::InvertedLogistic:
      // Survival copula of the logistic: X_i = -log(U_i) with U_i = exp(-1/Z_i).
      for (std::size_t i = 0; i < n; ++i) {
        const auto [z1, z2] = logistic_frechet(g, rng);
        out.push_back({1.0 / z1, 1.0 / z2});
      }
      break;
    case CopulaFamily::AsymmetricLogistic: {
      std::exponential_distribution<double> expo(1.0);
      const auto [t1, t2] = spec.asymmetry;
      for (std::size_t i = 0; i < n; ++i) {
        const auto [l1, l2] = logistic_frechet(g, rng);
        const double w1 = 1.0 / expo(rng);
        const double w2 = 1.0 / expo(rng);
        const double z1 = std::max((1.0 - t1) * w1, t1 * l1);
        const double z2 = std::max((1.0 - t2) * w2, t2 * l2);
        out.push_back({frechet_to_exponential(z1), frechet_to_exponential(z2)});
      }
      break;
    }
  }
  return out;
}

double analytic_gauge(const CopulaSpec& spec, const Point2& x) {
  if (!(x.x >= 0.0 && x.y >= 0.0) || x.x + x.y <= 0.0) {
    throw DomainError("gauge requires a nonnegative point other than the origin");
  }
  const double g = spec.dependence;
  switch (spec.family) {
    case CopulaFamily::Gaussian:
      return (x.x + x.y - 2.0 * g * std::sqrt(x.x * x.y)) / (1.0 - g * g);
    case CopulaFamily::Logistic:
      return logistic_gauge(g, x);
    case CopulaFamily::InvertedLogistic:
      return std::pow(std::pow(x.x, 1.0 / g) + std::pow(x.y, 1.0 / g), g);
    case CopulaFamily::AsymmetricLogistic:
      if (g < 1.0) return logistic_gauge(g, x);
      return x.x + x.y;
  }
  return 0.0;
}

double analytic_eta(const CopulaSpec& spec) {
  switch (spec.family) {
    case CopulaFamily::Gaussian: return 0.5 * (1.0 + spec.dependence);
    case CopulaFamily::InvertedLogistic: return std::pow(2.0, -spec.dependence);
    case CopulaFamily::Logistic:
    case CopulaFamily::AsymmetricLogistic: return 1.0;
  }
  return 0.0;
}

double analytic_lambda(const CopulaSpec& spec, double omega) {
  const double hi = std::max(omega, 1.0 - omega);
  const double lo = std::min(omega, 1.0 - omega);
  const double g = spec.dependence;
  switch (spec.family) {
    case CopulaFamily::Gaussian: {
      const double t = lo / hi;
      if (t <= g * g) return hi;
      return (1.0 - 2.0 * g * std::sqrt(omega * (1.0 - omega))) / (1.0 - g * g);
    }
    case CopulaFamily::InvertedLogistic:
      return std::pow(std::pow(omega, 1.0 / g) + std::pow(1.0 - omega, 1.0 / g), g);
    case CopulaFamily::Logistic:
    case CopulaFamily::AsymmetricLogistic: return hi;
  }
  return 0.0;
}

double analytic_tau1(const CopulaSpec& spec, double delta) {
  const double g = spec.dependence;
  switch (spec.family) {
    case CopulaFamily::Gaussian:
      if (delta >= g * g) return 1.0;
      return (1.0 - g * g) / (1.0 + delta - 2.0 * g * std::sqrt(delta));
    case CopulaFamily::Logistic:
      // Line from (gamma, 0) to (1, 1) cut by x2 = delta * x1.
      return 1.0 / (1.0 / g + (1.0 - 1.0 / g) * delta);
    case CopulaFamily::InvertedLogistic:
    case CopulaFamily::AsymmetricLogistic: return 1.0;
  }
  return 0.0;
}

AnalyticMeasures analytic_measures(const CopulaSpec& spec, std::span<const double> omega_grid,
                                   std::span<const double> delta_grid) {
  spec.validate();
  AnalyticMeasures m;
  m.eta = analytic_eta(spec);
  m.lambda.reserve(omega_grid.size());
  for (double w : omega_grid) m.lambda.push_back(analytic_lambda(spec, w));
  m.tau1.reserve(delta_grid.size());
  for (double d : delta_grid) m.tau1.push_back(analytic_tau1(spec, d));
  return m;
}

}  // namespace limitset
