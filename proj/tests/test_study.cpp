#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "limitset/errors.hpp"
#include "limitset/io.hpp"
#include "limitset/study.hpp"

using namespace limitset;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "limitset_test_study" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

StudyConfig smoke_config(const fs::path& out) {
  StudyConfig c;
  c.families = {CopulaFamily::Gaussian, CopulaFamily::Logistic};
  c.dependence = {0.5};
  c.replicates = 1;
  c.n = 600;
  c.fit.chain.iterations = 120;
  c.fit.chain.burn_in = 20;
  c.seed = 5;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("rmse and rmise") {
  const std::vector<double> truth{0.2, 0.4, 0.6};
  const std::vector<std::vector<double>> exact{truth, truth};
  CHECK(rmise(exact, truth) == 0.0);
  const double e = 0.3;
  const std::vector<std::vector<double>> shifted{{0.5, 0.7, 0.9}};
  CHECK(rmise(shifted, truth) == doctest::Approx(e));
  const std::vector<std::vector<double>> half{truth, {0.5, 0.7, 0.9}};
  CHECK(rmise(half, truth) == doctest::Approx(e / std::sqrt(2.0)));
  const std::vector<std::vector<double>> wrong{{0.1, 0.2}};
  CHECK_THROWS_AS(rmise(wrong, truth), DomainError);

  const std::vector<double> est{0.7, 0.8};
  CHECK(rmse(est, 0.75) == doctest::Approx(0.05));
  CHECK_THROWS_AS(rmse(std::vector<double>{}, 0.5), DomainError);
}

TEST_CASE("dataset seeds ignore fit settings") {
  const auto a = dataset_seed(1, CopulaFamily::Gaussian, 0.5, 3);
  CHECK(a == dataset_seed(1, CopulaFamily::Gaussian, 0.5, 3));
  CHECK(a != dataset_seed(1, CopulaFamily::Gaussian, 0.5, 4));
  CHECK(a != dataset_seed(1, CopulaFamily::Logistic, 0.5, 3));
  CHECK(a != dataset_seed(1, CopulaFamily::Gaussian, 0.6, 3));
  CHECK(a != dataset_seed(2, CopulaFamily::Gaussian, 0.5, 3));
}

TEST_CASE("two-row dataset fails at the threshold stage") {
  const std::vector<Point2> data{{1.0, 2.0}, {2.0, 1.0}};
  FitConfig c;
  try {
    fit_dataset(data, c);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "threshold");
    CHECK(std::string(e.what()).find("insufficient exceedances") != std::string::npos);
  }
  try {
    fit_dataset(std::vector<Point2>{{1.0, 1.0}}, c);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "input");
  }
}

TEST_CASE("oracle scheme without a gauge is a threshold failure") {
  const auto data = sample({CopulaFamily::Gaussian, 0.5, {0.5, 0.5}}, 200, 1);
  FitConfig c;
  c.scheme = ThresholdScheme::Oracle;
  try {
    fit_dataset(data, c);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "threshold");
  }
}

TEST_CASE("single-replicate smoke study emits every report file") {
  const auto out = scratch("smoke");
  const auto cfg = smoke_config(out);
  const auto r = run_study(cfg);
  REQUIRE(r.replicates.size() == 2);
  for (const auto& rec : r.replicates) CHECK(rec.ok);
  for (const char* f : {"replicates.csv", "curves.csv", "scores.csv", "ad_counts.csv",
                        "failures.log", "study.json"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK(r.scores.size() == 2);

  // reloaded records rescore to the same table
  const auto again = read_replicates(out);
  REQUIRE(again.size() == 2);
  CHECK(again[0].eta_median == r.replicates[0].eta_median);
  CHECK(again[1].lambda_median == r.replicates[1].lambda_median);
  const auto rescored = score_replicates(again, cfg);
  CHECK(rescored[0].rmise_lambda == r.scores[0].rmise_lambda);
  CHECK(rescored[1].mean_eta_median == r.scores[1].mean_eta_median);

  // rerun into another directory gives identical files
  const auto out2 = scratch("smoke2");
  auto cfg2 = cfg;
  cfg2.output_dir = out2;
  run_study(cfg2);
  for (const char* f : {"replicates.csv", "curves.csv", "scores.csv", "study.json"}) {
    CHECK(read_text(out / f) == read_text(out2 / f));
  }
}

TEST_CASE("study config round-trips through JSON") {
  StudyConfig c = smoke_config("x");
  c.fit.scheme = ThresholdScheme::Oracle;
  c.fit.prior.weights[kP02] = {0.2, 0.8, 0.0};
  const auto back = study_config_from_json(to_json(c));
  CHECK(back.families == c.families);
  CHECK(back.dependence == c.dependence);
  CHECK(back.fit.chain.iterations == 120);
  CHECK(back.fit.scheme == ThresholdScheme::Oracle);
  CHECK(back.fit.prior.weights[kP02].at_zero == 0.2);
  CHECK(back.seed == 5);
}

TEST_CASE("batch fits one summary row per file") {
  const auto in = scratch("batch_in");
  const auto out = scratch("batch_out");
  write_points_csv(in / "a_station.csv", sample({CopulaFamily::Gaussian, 0.5, {0.5, 0.5}}, 400, 2));
  write_text(in / "b_station.csv", "x1,x2\n1,2\n2,1\n");
  FitConfig c;
  c.chain.iterations = 60;
  c.chain.burn_in = 10;
  CHECK(fit_batch(in, out, c, 1) == 1);
  const auto summary = read_text(out / "batch_summary.csv");
  CHECK(summary.find("a_station.csv,ok") != std::string::npos);
  CHECK(summary.find("b_station.csv,failed,threshold") != std::string::npos);
  CHECK(fs::exists(out / "a_station" / "summary.json"));
  CHECK(fs::exists(out / "a_station" / "chain_1.csv"));
}
