#pragma once

// End-to-end fits and the simulation study: simulate or ingest data, rank
// transform, threshold, sample, summarize and score.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitset/copula.hpp"
#include "limitset/measures.hpp"
#include "limitset/sampler.hpp"
#include "limitset/tail_prep.hpp"

namespace limitset {

enum class ThresholdScheme { Marginal, Oracle };

std::string_view to_string(ThresholdScheme scheme);
ThresholdScheme parse_scheme(std::string_view name);

struct FitConfig {
  double tau = 0.75;
  ThresholdScheme scheme = ThresholdScheme::Marginal;
  /// Oracle scheme only: number of exceedances to keep; 0 matches the count
  /// the marginal scheme gives on the same data.
  std::size_t oracle_n_target = 0;
  std::size_t min_exceedances = 10;
  PriorSpec prior = PriorSpec::defaults();
  ChainConfig chain;
  std::vector<double> omega_grid = default_grid();
  std::vector<double> delta_grid = default_grid();
  std::size_t n_angles = 101;
};

struct FitResult {
  std::vector<Point2> margins;  ///< data on standard exponential margins
  PolarSample polar;
  std::vector<PosteriorSample> chains;
  PosteriorSummary summary;
  double rhat_alpha = 0.0;
  double rhat_eta = 0.0;
};

/// rank transform -> pseudo-polar -> threshold -> chains -> summary.
/// Failures are rethrown as StageError tagged "input", "rank_transform",
/// "threshold", "sampler" or "summary". The oracle scheme needs the true
/// gauge on the angle scale.
FitResult fit_dataset(std::span<const Point2> data, const FitConfig& config,
                      const std::function<double(double)>& oracle_gauge = {});

/// Persists margins.csv, polar.csv, chain_<c>.csv, measures.csv,
/// per_draw.csv, boundary.csv and summary.json under dir.
void write_fit(const std::filesystem::path& dir, const FitResult& fit);

/// Fields of a fit summary as one JSON object (also used for batch rows).
nlohmann::json fit_json(const FitResult& fit);

struct StudyConfig {
  std::vector<CopulaFamily> families{CopulaFamily::Gaussian, CopulaFamily::Logistic,
                                     CopulaFamily::InvertedLogistic,
                                     CopulaFamily::AsymmetricLogistic};
  std::vector<double> dependence{0.3, 0.4, 0.5, 0.6, 0.7};
  std::pair<double, double> asymmetry{0.5, 0.5};
  std::size_t replicates = 10;
  std::size_t n = 5000;
  FitConfig fit;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::filesystem::path output_dir = "study_out";

  /// Throws DomainError for an empty design, zero replicates or n < 2.
  void validate() const;
};

nlohmann::json to_json(const StudyConfig& config);
/// Fields absent from j keep their values in base.
StudyConfig study_config_from_json(const nlohmann::json& j, StudyConfig base = {});

/// Seeds depend only on (master, family, dependence, replicate), so the same
/// dataset is drawn regardless of threshold scheme or chain settings.
std::uint64_t dataset_seed(std::uint64_t master, CopulaFamily family, double dependence,
                           std::size_t replicate);

struct ReplicateRecord {
  CopulaFamily family = CopulaFamily::Gaussian;
  double dependence = 0.0;
  std::size_t replicate = 0;
  bool ok = false;
  std::string error_stage;
  std::string error;
  std::size_t n_exceed = 0;
  double eta_median = 0.0;
  double eta_lower = 0.0;
  double eta_upper = 0.0;
  double prob_ad = 0.0;
  double rhat_alpha = 0.0;
  double rhat_eta = 0.0;
  double min_acceptance = 0.0;
  double max_acceptance = 0.0;
  std::vector<double> lambda_median;
  std::vector<double> tau1_median;
};

struct ScenarioScore {
  CopulaFamily family = CopulaFamily::Gaussian;
  double dependence = 0.0;
  std::size_t fitted = 0;
  std::size_t failed = 0;
  std::size_t ad_count = 0;  ///< replicates with posterior-median eta = 1
  double mean_eta_median = 0.0;
  double true_eta = 0.0;
  double rmse_eta = 0.0;
  double rmise_lambda = 0.0;
  double rmise_tau1 = 0.0;
  double coverage_eta = 0.0;  ///< share of 95% credible intervals holding the truth
};

struct StudyResult {
  std::vector<ReplicateRecord> replicates;
  std::vector<ScenarioScore> scores;
};

/// Runs every (family, dependence, replicate) on a bounded worker pool and
/// writes the report files. A failed replicate is logged and skipped.
StudyResult run_study(const StudyConfig& config);

/// sqrt(mean squared error). Throws DomainError on an empty input.
double rmse(std::span<const double> estimates, double truth);
/// sqrt(mean over datasets of the grid-mean squared error). Throws
/// DomainError when a grid length differs from the truth.
double rmise(std::span<const std::vector<double>> estimates, std::span<const double> truth);

std::vector<ScenarioScore> score_replicates(std::span<const ReplicateRecord> records,
                                            const StudyConfig& config);

/// replicates.csv, curves.csv, scores.csv, ad_counts.csv, failures.log,
/// study.json.
void write_study_report(const std::filesystem::path& dir, const StudyConfig& config,
                        const StudyResult& result);

/// Reloads replicates.csv and curves.csv from a study directory.
std::vector<ReplicateRecord> read_replicates(const std::filesystem::path& dir);

/// Fits every *.csv in dir (sorted by name) and writes one summary row per
/// file to dir_out/batch_summary.csv; per-file outputs go to dir_out/<stem>.
/// Returns the number of failed files.
std::size_t fit_batch(const std::filesystem::path& dir, const std::filesystem::path& dir_out,
                      const FitConfig& config, std::size_t threads);

}  // namespace limitset
