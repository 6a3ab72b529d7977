#pragma once

// Metropolis sampler over the nine spline coordinates and the Gamma shape
// alpha. Coordinates with point-mass priors move between the continuum and
// the masses with a dedicated jump proposal; densities are taken w.r.t.
// Lebesgue measure plus Dirac measures at the mass locations.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "limitset/bezier.hpp"
#include "limitset/likelihood.hpp"

namespace limitset {

/// Mixture of Uniform(0,1) with point masses at 0 and 1.
struct MixtureWeights {
  double at_zero = 0.0;
  double uniform = 1.0;
  double at_one = 0.0;

  bool has_mass() const { return at_zero > 0.0 || at_one > 0.0; }
};

struct PriorSpec {
  double alpha_log_mean = 1.0;
  double alpha_log_sd = 1.0;
  /// One mixture per coordinate. The p31 entry applies only when
  /// max(p21, p42) = 1; otherwise p31 is Uniform(0,1).
  std::array<MixtureWeights, kNumSplineParams> weights;

  /// p12, p51 uniform; p11, p52, p02, p61 with 0.1 at 0; p21, p42 with 0.1 at
  /// each end; p31 with 0.4 at 1 under AD.
  static PriorSpec defaults();

  /// Throws DomainError when weights are negative or do not sum to 1.
  void validate() const;
};

/// Mixture weights governing p31 for the given p21, p42.
MixtureWeights p31_weights(const PriorSpec& prior, double p21, double p42);

/// Unnormalized log prior density; -inf outside the support, for an invalid
/// spline, or for p31 = 1 when the mass at 1 is unavailable.
double log_prior(const SplineParams& params, double alpha, const PriorSpec& prior);

double log_normal_log_density(double x, double log_mean, double log_sd);

struct ChainConfig {
  std::size_t iterations = 11000;
  std::size_t burn_in = 1000;
  double target_acceptance = 0.4;
  double jump_probability = 0.2;
  double initial_step = 0.1;        ///< random-walk sd for the spline coordinates
  double initial_alpha_step = 0.1;  ///< random-walk sd for log alpha
  std::uint64_t seed = 1;
  std::size_t chains = 2;
  /// Sample the prior alone (the data are ignored).
  bool likelihood_off = false;

  /// Throws DomainError when burn_in >= iterations, the target is outside
  /// (0,1), or the jump probability is outside [0,1].
  void validate() const;
};

/// Index of alpha in per-parameter arrays, after the nine coordinates.
inline constexpr std::size_t kAlphaIndex = kNumSplineParams;
inline constexpr std::size_t kNumSampled = kNumSplineParams + 1;

using Rng = std::mt19937_64;

/// Independent stream seed for chain `index` of a run seeded by `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct Draw {
  SplineParams params;
  double alpha = 0.0;
  double log_posterior = 0.0;
};

/// Current position of one chain with its cached prior and likelihood.
class ChainState {
 public:
  /// `data` may be null (prior only). Throws DomainError when the start has
  /// a non-finite log posterior.
  ChainState(const ExceedanceSet* data, const PriorSpec& prior, const SplineParams& params,
             double alpha);

  const SplineParams& params() const { return params_; }
  double alpha() const { return alpha_; }
  double log_prior() const { return log_prior_; }
  double log_likelihood() const { return lik_ ? lik_->value() : 0.0; }
  double log_posterior() const { return log_prior_ + log_likelihood(); }

  struct StepResult {
    bool accepted = false;
    /// Set for random-walk proposals: min(1, acceptance ratio), 0 when the
    /// proposal left [0,1] or the support.
    std::optional<double> rw_acceptance;
  };

  /// One Metropolis update of coordinate `index` (kAlphaIndex for alpha).
  StepResult step(std::size_t index, double step_size, double jump_probability, Rng& rng);

 private:
  StepResult try_spline(SplineParams proposal, bool random_walk, Rng& rng);

  const ExceedanceSet* data_;
  PriorSpec prior_;
  SplineParams params_;
  double alpha_;
  double log_prior_;
  std::optional<LikelihoodState> lik_;
};

struct PosteriorSample {
  std::vector<Draw> draws;
  /// Post-burn-in acceptance of random-walk proposals per parameter.
  std::array<double, kNumSampled> acceptance{};
  /// Step sizes after burn-in.
  std::array<double, kNumSampled> step_sizes{};
  /// Step sizes at the end of every burn-in iteration.
  std::vector<std::array<double, kNumSampled>> tuning_trace;
  std::uint64_t seed = 0;
};

/// A valid start: every coordinate 0.5 and alpha = 2, perturbed by widening
/// uniform noise until valid. Throws DomainError after max_tries failures.
Draw initial_state(const PriorSpec& prior, Rng& rng, std::size_t max_tries = 10000);

/// Single chain using config.seed. Throws DomainError on an empty data set
/// unless the likelihood is switched off.
PosteriorSample run_chain(const ExceedanceSet* data, const PriorSpec& prior,
                          const ChainConfig& config);

/// config.chains chains run concurrently with seeds derive_seed(config.seed, c).
std::vector<PosteriorSample> run_chains(const ExceedanceSet* data, const PriorSpec& prior,
                                        const ChainConfig& config);

/// Split-chain potential scale reduction of a scalar across chains (each
/// chain halved). NaN when fewer than four draws per chain.
double split_rhat(std::span<const std::vector<double>> chains);

/// Valid spline of every draw, in order, across all chains.
std::vector<GaugeSpline> splines_of(std::span<const PosteriorSample> chains);

}  // namespace limitset
