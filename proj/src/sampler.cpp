#include "limitset/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "limitset/errors.hpp"

namespace limitset {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinStep = 1e-4;
constexpr double kMaxStep = 1.0;
constexpr double kMaxAlphaStep = 5.0;

double log_mixture(double v, const MixtureWeights& w) {
  if (!(v >= 0.0 && v <= 1.0)) return kNegInf;
  if (v == 0.0 && w.at_zero > 0.0) return std::log(w.at_zero);
  if (v == 1.0 && w.at_one > 0.0) return std::log(w.at_one);
  return w.uniform > 0.0 ? std::log(w.uniform) : kNegInf;
}

bool at_mass(double v, const MixtureWeights& w) {
  return (v == 0.0 && w.at_zero > 0.0) || (v == 1.0 && w.at_one > 0.0);
}

// Mass location a jump from v would target; 0 and 1 split at 0.5.
double nearest_mass(double v, const MixtureWeights& w) {
  if (w.at_zero > 0.0 && w.at_one > 0.0) return v < 0.5 ? 0.0 : 1.0;
  return w.at_zero > 0.0 ? 0.0 : 1.0;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double normal01(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

PriorSpec PriorSpec::defaults() {
  PriorSpec p;
  const MixtureWeights uniform{0.0, 1.0, 0.0};
  const MixtureWeights zero_spike{0.1, 0.9, 0.0};
  const MixtureWeights two_spikes{0.1, 0.8, 0.1};
  p.weights[kP02] = zero_spike;
  p.weights[kP11] = zero_spike;
  p.weights[kP12] = uniform;
  p.weights[kP21] = two_spikes;
  p.weights[kP31] = MixtureWeights{0.0, 0.6, 0.4};
  p.weights[kP42] = two_spikes;
  p.weights[kP51] = uniform;
  p.weights[kP52] = zero_spike;
  p.weights[kP61] = zero_spike;
  return p;
}

void PriorSpec::validate() const {
  if (!(alpha_log_sd > 0.0) || !std::isfinite(alpha_log_mean)) {
    throw DomainError("alpha prior needs a finite log-mean and positive log-sd");
  }
  for (std::size_t i = 0; i < kNumSplineParams; ++i) {
    const auto& w = weights[i];
    if (w.at_zero < 0.0 || w.uniform < 0.0 || w.at_one < 0.0) {
      throw DomainError("negative prior weight for " + std::string(SplineParams::kNames[i]));
    }
    if (std::abs(w.at_zero + w.uniform + w.at_one - 1.0) > 1e-12) {
      throw DomainError("prior weights for " + std::string(SplineParams::kNames[i]) +
                        " do not sum to 1");
    }
  }
}

MixtureWeights p31_weights(const PriorSpec& prior, double p21, double p42) {
  if (std::max(p21, p42) == 1.0) return prior.weights[kP31];
  return MixtureWeights{0.0, 1.0, 0.0};
}

double log_normal_log_density(double x, double log_mean, double log_sd) {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  const double z = (std::log(x) - log_mean) / log_sd;
  return -std::log(x) - std::log(log_sd) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
}

double log_prior(const SplineParams& params, double alpha, const PriorSpec& prior) {
  double lp = log_normal_log_density(alpha, prior.alpha_log_mean, prior.alpha_log_sd);
  for (std::size_t i = 0; i < kNumSplineParams && lp > kNegInf; ++i) {
    const MixtureWeights w =
        i == kP31 ? p31_weights(prior, params.p21(), params.p42()) : prior.weights[i];
    if (i == kP31 && params[i] == 1.0 && !at_mass(1.0, w)) return kNegInf;
    lp += log_mixture(params[i], w);
  }
  if (!(lp > kNegInf) || !satisfies_constraints(params)) return kNegInf;
  return lp;
}

void ChainConfig::validate() const {
  if (iterations == 0 || burn_in >= iterations) {
    throw DomainError("burn_in must be smaller than iterations");
  }
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw DomainError("target_acceptance must lie in (0,1)");
  }
  if (!(jump_probability >= 0.0 && jump_probability <= 1.0)) {
    throw DomainError("jump_probability must lie in [0,1]");
  }
  if (!(initial_step > 0.0) || !(initial_alpha_step > 0.0)) {
    throw DomainError("initial step sizes must be positive");
  }
  if (chains == 0) throw DomainError("at least one chain is required");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl sequence
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChainState::ChainState(const ExceedanceSet* data, const PriorSpec& prior,
                       const SplineParams& params, double alpha)
    : data_(data), prior_(prior), params_(params), alpha_(alpha) {
  log_prior_ = limitset::log_prior(params_, alpha_, prior_);
  if (!(log_prior_ > kNegInf)) throw DomainError("initial state is outside the prior support");
  if (data_ != nullptr) {
    lik_.emplace(*data_, GaugeSpline::from_params(params_), alpha_);
    if (!std::isfinite(lik_->value())) {
      throw DomainError("initial state has a non-finite likelihood");
    }
  }
}

ChainState::StepResult ChainState::try_spline(SplineParams proposal, bool random_walk,
                                              Rng& rng) {
  StepResult res;
  if (random_walk) res.rw_acceptance = 0.0;
  const double lp = limitset::log_prior(proposal, alpha_, prior_);
  if (!(lp > kNegInf)) return res;
  double ll = 0.0;
  if (lik_) {
    ll = lik_->propose_spline(*build_spline(proposal).spline);
    if (!(ll > kNegInf)) return res;
  }
  const double log_ratio = lp + ll - log_posterior();
  if (random_walk) res.rw_acceptance = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
    params_ = proposal;
    log_prior_ = lp;
    if (lik_) lik_->commit();
    res.accepted = true;
  }
  return res;
}

ChainState::StepResult ChainState::step(std::size_t index, double step_size,
                                        double jump_probability, Rng& rng) {
  if (index == kAlphaIndex) {
    StepResult res;
    const double proposal = alpha_ * std::exp(step_size * normal01(rng));
    const double lp_alpha_old = log_normal_log_density(alpha_, prior_.alpha_log_mean,
                                                       prior_.alpha_log_sd);
    const double lp_alpha_new = log_normal_log_density(proposal, prior_.alpha_log_mean,
                                                       prior_.alpha_log_sd);
    res.rw_acceptance = 0.0;
    if (!(lp_alpha_new > kNegInf)) return res;
    const double ll = lik_ ? lik_->propose_alpha(proposal) : 0.0;
    if (!(ll > kNegInf)) return res;
    // log-scale random walk: the Jacobian contributes alpha'/alpha
    const double log_ratio = lp_alpha_new - lp_alpha_old + ll - log_likelihood() +
                             std::log(proposal) - std::log(alpha_);
    res.rw_acceptance = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    if (log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio) {
      log_prior_ += lp_alpha_new - lp_alpha_old;
      alpha_ = proposal;
      if (lik_) lik_->commit();
      res.accepted = true;
    }
    return res;
  }
  if (index >= kNumSplineParams) throw std::out_of_range("parameter index out of range");

  const MixtureWeights w =
      index == kP31 ? p31_weights(prior_, params_.p21(), params_.p42()) : prior_.weights[index];
  const double v = params_[index];
  SplineParams proposal = params_;

  if (at_mass(v, w)) {
    // Leave the mass for a uniform point; the move is only proposed when the
    // reverse jump would target this mass, which keeps the pair reversible.
    if (uniform01(rng) >= jump_probability) return {};
    const double u = uniform01(rng);
    if (!(w.uniform > 0.0) || nearest_mass(u, w) != v) return {};
    proposal[index] = u;
    return try_spline(proposal, false, rng);
  }
  if (w.has_mass() && uniform01(rng) < jump_probability) {
    proposal[index] = nearest_mass(v, w);
    return try_spline(proposal, false, rng);
  }
  proposal[index] = v + step_size * normal01(rng);
  if (!(proposal[index] >= 0.0 && proposal[index] <= 1.0)) {
    StepResult res;
    res.rw_acceptance = 0.0;
    return res;
  }
  return try_spline(proposal, true, rng);
}

Draw initial_state(const PriorSpec& prior, Rng& rng, std::size_t max_tries) {
  Draw d;
  d.alpha = 2.0;
  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    // widen the perturbation around 0.5 as attempts accumulate
    const double spread = std::min(1.0, 0.1 * static_cast<double>(attempt));
    for (std::size_t i = 0; i < kNumSplineParams; ++i) {
      d.params[i] = 0.5 + spread * (uniform01(rng) - 0.5);
    }
    d.log_posterior = log_prior(d.params, d.alpha, prior);
    if (d.log_posterior > kNegInf) return d;
  }
  throw DomainError("no valid initial state found");
}

PosteriorSample run_chain(const ExceedanceSet* data, const PriorSpec& prior,
                          const ChainConfig& config) {
  config.validate();
  prior.validate();
  const ExceedanceSet* used = config.likelihood_off ? nullptr : data;
  if (!config.likelihood_off && data == nullptr) {
    throw DomainError("posterior sampling needs exceedances");
  }

  Rng rng(config.seed);
  std::optional<ChainState> state;
  constexpr int kStartRetries = 100;
  for (int attempt = 0; attempt < kStartRetries && !state; ++attempt) {
    const Draw start = initial_state(prior, rng);
    try {
      state.emplace(used, prior, start.params, start.alpha);
    } catch (const DomainError&) {
    }
  }
  if (!state) throw DomainError("no initial state with a finite posterior found");

  PosteriorSample out;
  out.seed = config.seed;
  std::array<double, kNumSampled> step{};
  step.fill(config.initial_step);
  step[kAlphaIndex] = config.initial_alpha_step;
  std::array<std::size_t, kNumSampled> trials{}, accepts{};

  const std::size_t kept = config.iterations - config.burn_in;
  out.draws.reserve(kept);
  out.tuning_trace.reserve(config.burn_in);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool burning = it < config.burn_in;
    const double gain = 1.0 / std::pow(static_cast<double>(it + 1), 0.6);
    for (std::size_t k = 0; k < kNumSampled; ++k) {
      const std::size_t idx = k == 0 ? kAlphaIndex : k - 1;
      const auto res = state->step(idx, step[idx], config.jump_probability, rng);
      if (!res.rw_acceptance) continue;
      if (burning) {
        const double hi = idx == kAlphaIndex ? kMaxAlphaStep : kMaxStep;
        step[idx] = std::clamp(
            step[idx] * std::exp(gain * (*res.rw_acceptance - config.target_acceptance)),
            kMinStep, hi);
      } else {
        ++trials[idx];
        if (res.accepted) ++accepts[idx];
      }
    }
    if (burning) {
      out.tuning_trace.push_back(step);
      continue;
    }
    if (!satisfies_constraints(state->params())) {
      throw std::logic_error("sampler stored an invalid spline");
    }
    out.draws.push_back({state->params(), state->alpha(), state->log_posterior()});
  }

  out.step_sizes = step;
  for (std::size_t i = 0; i < kNumSampled; ++i) {
    out.acceptance[i] = trials[i] == 0 ? std::numeric_limits<double>::quiet_NaN()
                                       : static_cast<double>(accepts[i]) /
                                             static_cast<double>(trials[i]);
  }
  return out;
}

std::vector<PosteriorSample> run_chains(const ExceedanceSet* data, const PriorSpec& prior,
                                        const ChainConfig& config) {
  config.validate();
  std::vector<PosteriorSample> out(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < config.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        ChainConfig cc = config;
        cc.seed = derive_seed(config.seed, c);
        out[c] = run_chain(data, prior, cc);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double split_rhat(std::span<const std::vector<double>> chains) {
  std::vector<std::span<const double>> halves;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) n = std::min(n, c.size() / 2);
  if (chains.empty() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : chains) {
    halves.emplace_back(c.data(), n);
    halves.emplace_back(c.data() + c.size() - n, n);
  }
  const double m = static_cast<double>(halves.size());
  const double len = static_cast<double>(n);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& h : halves) {
    double mean = 0.0;
    for (double x : h) mean += x;
    mean /= len;
    double var = 0.0;
    for (double x : h) var += (x - mean) * (x - mean);
    within += var / (len - 1.0);
    means.push_back(mean);
  }
  within /= m;
  double grand = 0.0;
  for (double x : means) grand += x;
  grand /= m;
  double between = 0.0;
  for (double x : means) between += (x - grand) * (x - grand);
  between *= len / (m - 1.0);
  if (within == 0.0) return between == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double pooled = (len - 1.0) / len * within + between / len;
  return std::sqrt(pooled / within);
}

std::vector<GaugeSpline> splines_of(std::span<const PosteriorSample> chains) {
  std::vector<GaugeSpline> out;
  for (const auto& c : chains) {
    for (const auto& d : c.draws) out.push_back(GaugeSpline::from_params(d.params));
  }
  return out;
}

}  // namespace limitset
