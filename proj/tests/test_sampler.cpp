#include <doctest.h>

#include <cmath>
#include <numbers>

#include "limitset/copula.hpp"
#include "limitset/errors.hpp"
#include "limitset/sampler.hpp"

using namespace limitset;

namespace {

double lognormal_pdf_log(double x, double mu, double sigma) {
  const double z = (std::log(x) - mu) / sigma;
  return -std::log(x * sigma * std::sqrt(2.0 * std::numbers::pi)) - 0.5 * z * z;
}

}  // namespace

TEST_CASE("default prior weights") {
  const auto p = PriorSpec::defaults();
  CHECK_NOTHROW(p.validate());
  CHECK(p.weights[kP21].at_zero == 0.1);
  CHECK(p.weights[kP21].at_one == 0.1);
  CHECK(p.weights[kP12].uniform == 1.0);
  CHECK(p.weights[kP02].at_zero == 0.1);
  CHECK(p.weights[kP31].at_one == 0.4);
  PriorSpec bad = p;
  bad.weights[kP11].uniform = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("log prior of the logistic shape") {
  const auto prior = PriorSpec::defaults();
  const auto params = logistic_shape_params(0.5);
  // p02, p11, p52, p61 continuous under a 0.9 slab; p12, p51 flat;
  // p21 = p42 = 1 hit the 0.1 masses and p31 = 1 the 0.4 mass.
  const double expected = lognormal_pdf_log(2.0, 1.0, 1.0) + 4.0 * std::log(0.9) +
                          2.0 * std::log(0.1) + std::log(0.4);
  CHECK(log_prior(params, 2.0, prior) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("prior support") {
  const auto prior = PriorSpec::defaults();
  SplineParams p{{0.6, 0.2, 0.8, 0.4, 0.8, 0.5, 0.9, 0.3, 0.7}};
  REQUIRE(std::isfinite(log_prior(p, 2.0, prior)));
  SplineParams bad = p;
  bad[kP11] = 0.5;  // p11 > p21
  CHECK(std::isinf(log_prior(bad, 2.0, prior)));
  bad = p;
  bad[kP31] = 1.0;  // mass at 1 unavailable while max(p21, p42) < 1
  CHECK(std::isinf(log_prior(bad, 2.0, prior)));
  bad[kP21] = 1.0;
  bad[kP11] = 0.2;
  CHECK(std::isfinite(log_prior(bad, 2.0, prior)));
  CHECK(std::isinf(log_prior(p, 0.0, prior)));
  CHECK(std::isinf(log_prior(p, -1.0, prior)));
}

TEST_CASE("chain config validation") {
  ChainConfig c;
  CHECK_NOTHROW(c.validate());
  c.burn_in = c.iterations;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = ChainConfig{};
  c.target_acceptance = 1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("derived seeds differ") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("initial state is valid") {
  Rng rng(4);
  const auto d = initial_state(PriorSpec::defaults(), rng);
  CHECK(satisfies_constraints(d.params));
  CHECK(d.alpha == 2.0);
}

TEST_CASE("steps never leave the valid set") {
  const auto prior = PriorSpec::defaults();
  Rng rng(9);
  const auto start = initial_state(prior, rng);
  ChainState st(nullptr, prior, start.params, start.alpha);
  for (int it = 0; it < 20000; ++it) {
    const std::size_t idx = static_cast<std::size_t>(it) % kNumSampled;
    st.step(idx, 0.3, 0.2, rng);
    REQUIRE(satisfies_constraints(st.params()));
    REQUIRE(std::isfinite(st.log_posterior()));
  }
}

TEST_CASE("random walk on p12 with the likelihood off") {
  // p12 has a flat prior; the only rejections come from leaving [0,1] and from
  // the slope condition p12 p21 >= p11, which has slack at p11 = 0.05.
  const auto prior = PriorSpec::defaults();
  const SplineParams start{{0.6, 0.05, 0.8, 0.9, 0.95, 0.5, 0.9, 0.3, 0.7}};
  ChainState st(nullptr, prior, start, 2.0);
  Rng rng(2);
  int trials = 0, accepted = 0;
  for (int it = 0; it < 50000; ++it) {
    const auto r = st.step(kP12, 0.05, 0.2, rng);
    if (!r.rw_acceptance) continue;
    ++trials;
    accepted += r.accepted;
  }
  CHECK(static_cast<double>(accepted) / trials > 0.5);
}

TEST_CASE("chains are reproducible and stored draws are valid") {
  const CopulaSpec spec{CopulaFamily::Gaussian, 0.5, {0.5, 0.5}};
  const ExceedanceSet data(marginal_threshold(to_exponential_margins(sample(spec, 800, 3)), 0.75));
  ChainConfig c;
  c.iterations = 300;
  c.burn_in = 100;
  c.seed = 77;
  const auto a = run_chains(&data, PriorSpec::defaults(), c);
  const auto b = run_chains(&data, PriorSpec::defaults(), c);
  REQUIRE(a.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    REQUIRE(a[k].draws.size() == 200);
    CHECK(a[k].tuning_trace.size() == 100);
    for (std::size_t i = 0; i < a[k].draws.size(); ++i) {
      CHECK(a[k].draws[i].params == b[k].draws[i].params);
      CHECK(a[k].draws[i].alpha == b[k].draws[i].alpha);
      CHECK(satisfies_constraints(a[k].draws[i].params));
    }
  }
  CHECK_FALSE(a[0].draws.back().params == a[1].draws.back().params);
  CHECK_THROWS_AS(run_chain(nullptr, PriorSpec::defaults(), c), DomainError);
}

TEST_CASE("prior-only alpha draws follow the log-normal") {
  ChainConfig c;
  c.iterations = 41000;
  c.burn_in = 1000;
  c.likelihood_off = true;
  c.seed = 3;
  const auto s = run_chain(nullptr, PriorSpec::defaults(), c);
  double mean_log = 0.0;
  for (const auto& d : s.draws) mean_log += std::log(d.alpha);
  mean_log /= static_cast<double>(s.draws.size());
  CHECK(mean_log == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("split R-hat") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<std::vector<double>> same(2), shifted(2);
  for (int i = 0; i < 4000; ++i) {
    same[0].push_back(n01(rng));
    same[1].push_back(n01(rng));
    shifted[0].push_back(n01(rng));
    shifted[1].push_back(n01(rng) + 2.0);
  }
  CHECK(split_rhat(same) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(split_rhat(shifted) > 1.2);
  std::vector<std::vector<double>> constant{{1, 1, 1, 1}, {1, 1, 1, 1}};
  CHECK(split_rhat(constant) == 1.0);
  std::vector<std::vector<double>> tiny{{1, 2}};
  CHECK(std::isnan(split_rhat(tiny)));
}
