// limitset: simulate data, fit spline limit sets, run the simulation study and
// compute dependence measures from the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "limitset/copula.hpp"
#include "limitset/errors.hpp"
#include "limitset/io.hpp"
#include "limitset/measures.hpp"
#include "limitset/study.hpp"
#include "limitset/tail_prep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace limitset;

namespace {

// Relative output paths are placed under $LIMITSET_OUTPUT_ROOT when set.
fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("LIMITSET_OUTPUT_ROOT"); root && *root) {
    return fs::path(root) / path;
  }
  return path;
}

struct Overrides {
  std::string config;
  double tau = -1;
  std::string scheme;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::size_t chains = 0;
  long long seed = -1;
  std::size_t threads = 0;
  bool likelihood_off = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--tau", o.tau, "threshold quantile");
  cmd->add_option("--scheme", o.scheme, "threshold scheme: marginal or oracle");
  cmd->add_option("--iterations", o.iterations, "MCMC iterations per chain");
  cmd->add_option("--burn-in", o.burn_in, "burn-in iterations");
  cmd->add_option("--chains", o.chains, "number of chains");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_flag("--prior-only", o.likelihood_off, "ignore the data and sample the prior");
}

StudyConfig resolve(const Overrides& o) {
  StudyConfig c;
  if (!o.config.empty()) c = study_config_from_json(json::parse(read_text(o.config)), c);
  if (o.tau > 0) c.fit.tau = o.tau;
  if (!o.scheme.empty()) c.fit.scheme = parse_scheme(o.scheme);
  if (o.iterations > 0) c.fit.chain.iterations = o.iterations;
  if (o.burn_in > 0) c.fit.chain.burn_in = o.burn_in;
  if (o.chains > 0) c.fit.chain.chains = o.chains;
  if (o.seed >= 0) {
    c.seed = static_cast<std::uint64_t>(o.seed);
    c.fit.chain.seed = c.seed;
  }
  if (o.threads > 0) c.threads = o.threads;
  if (o.likelihood_off) c.fit.chain.likelihood_off = true;
  return c;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& cell : split_csv_line(s)) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  return out;
}

void print_table(const std::vector<ScenarioScore>& scores) {
  std::printf("%-20s %6s %8s %10s %8s %9s %9s %9s %8s\n", "family", "dep", "ad/fit", "eta_med",
              "eta", "rmse_eta", "rmise_l", "rmise_t1", "cover");
  for (const auto& s : scores) {
    std::printf("%-20s %6.2f %4zu/%-3zu %10.4f %8.4f %9.4f %9.4f %9.4f %8.2f\n",
                std::string(to_string(s.family)).c_str(), s.dependence, s.ad_count, s.fitted,
                s.mean_eta_median, s.true_eta, s.rmse_eta, s.rmise_lambda, s.rmise_tau1,
                s.coverage_eta);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian spline limit-set estimation of bivariate tail dependence"};
  app.require_subcommand(1);

  // simulate
  std::string family = "gaussian", sim_out = "data.csv", asym;
  double dependence = 0.5;
  std::size_t n = 5000;
  std::uint64_t sim_seed = 1;
  auto* sim = app.add_subcommand("simulate", "draw a copula sample on exponential margins");
  sim->add_option("--family", family, "gaussian, logistic, inverted_logistic, asymmetric_logistic");
  sim->add_option("--dependence", dependence, "rho or gamma");
  sim->add_option("--asymmetry", asym, "theta1,theta2 for the asymmetric logistic");
  sim->add_option("-n,--n", n, "sample size");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("-o,--out", sim_out, "output CSV");

  // prep
  std::string prep_in, prep_out = "polar.csv";
  double prep_tau = 0.75;
  auto* prep = app.add_subcommand("prep", "rank transform and marginal threshold");
  prep->add_option("-i,--input", prep_in, "bivariate CSV")->required();
  prep->add_option("--tau", prep_tau, "threshold quantile");
  prep->add_option("-o,--out", prep_out, "output CSV (r, w, r0, exceed)");

  // fit
  Overrides fit_o;
  std::string fit_in, fit_batch_dir, fit_out = "fit_out", oracle_family;
  double oracle_dependence = 0.5;
  auto* fit = app.add_subcommand("fit", "fit one dataset or a directory of datasets");
  fit->add_option("-i,--input", fit_in, "bivariate CSV");
  fit->add_option("--batch-dir", fit_batch_dir, "directory of CSVs fitted independently");
  fit->add_option("-o,--out", fit_out, "output directory");
  fit->add_option("--oracle-family", oracle_family, "true family for the oracle threshold");
  fit->add_option("--oracle-dependence", oracle_dependence, "true dependence for the oracle threshold");
  add_common(fit, fit_o);

  // study
  Overrides study_o;
  std::string study_out, families_arg, dependence_arg;
  std::size_t replicates = 0, study_n = 0;
  auto* study = app.add_subcommand("study", "run the simulation study");
  study->add_option("--families", families_arg, "comma-separated families");
  study->add_option("--dependence", dependence_arg, "comma-separated dependence levels");
  study->add_option("--replicates", replicates, "datasets per scenario");
  study->add_option("-n,--n", study_n, "observations per dataset");
  study->add_option("-o,--out", study_out, "output directory");
  add_common(study, study_o);

  // measures
  std::string params_arg, params_json, chain_csv, measures_out;
  auto* meas = app.add_subcommand("measures", "dependence measures of a spline or chain file");
  meas->add_option("--params", params_arg, "nine comma-separated coordinates p02..p61");
  meas->add_option("--params-json", params_json, "JSON object keyed p02..p61");
  meas->add_option("--chain", chain_csv, "chain CSV written by fit");
  meas->add_option("-o,--out", measures_out, "output directory for CSV/JSON (default: stdout)");

  // report
  std::string report_dir;
  auto* rep = app.add_subcommand("report", "rescore a study directory and print the table");
  rep->add_option("--study-dir", report_dir, "directory written by study")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      CopulaSpec spec{parse_family(family), dependence, {0.5, 0.5}};
      if (!asym.empty()) {
        const auto a = parse_list(asym);
        if (a.size() != 2) throw DomainError("--asymmetry needs two values");
        spec.asymmetry = {a[0], a[1]};
      }
      spec.validate();
      const auto pts = sample(spec, n, sim_seed);
      write_points_csv(output_path(sim_out), pts);
      return 0;
    }

    if (prep->parsed()) {
      const auto data = read_points_csv(prep_in);
      const auto polar = marginal_threshold(to_exponential_margins(data), prep_tau);
      write_polar_csv(output_path(prep_out), polar);
      std::printf("n=%zu exceedances=%zu\n", polar.n_total, polar.n_exceed);
      return 0;
    }

    if (fit->parsed()) {
      const StudyConfig c = resolve(fit_o);
      FitConfig fc = c.fit;
      const fs::path out = output_path(fit_out);
      if (!fit_batch_dir.empty()) {
        const std::size_t failed = fit_batch(fit_batch_dir, out, fc, c.threads);
        std::printf("batch finished, %zu failed; summary in %s\n", failed,
                    (out / "batch_summary.csv").string().c_str());
        return failed == 0 ? 0 : 1;
      }
      if (fit_in.empty()) throw DomainError("fit needs --input or --batch-dir");
      std::vector<Point2> data;
      try {
        data = read_points_csv(fit_in);
      } catch (const std::exception& e) {
        throw StageError("input", e.what());
      }
      std::function<double(double)> gauge;
      if (!oracle_family.empty()) {
        const CopulaSpec spec{parse_family(oracle_family), oracle_dependence, {0.5, 0.5}};
        gauge = [spec](double w) { return analytic_gauge(spec, {w, 1.0 - w}); };
      }
      const FitResult result = fit_dataset(data, fc, gauge);
      write_fit(out, result);
      std::printf("n_exceed=%zu eta_median=%s P(eta=1)=%s rhat_alpha=%s rhat_eta=%s\n",
                  result.polar.n_exceed, format_double(result.summary.eta_median).c_str(),
                  format_double(result.summary.prob_ad).c_str(),
                  format_double(result.rhat_alpha).c_str(), format_double(result.rhat_eta).c_str());
      return 0;
    }

    if (study->parsed()) {
      StudyConfig c = resolve(study_o);
      if (!families_arg.empty()) {
        c.families.clear();
        for (const auto& f : split_csv_line(families_arg)) c.families.push_back(parse_family(f));
      }
      if (!dependence_arg.empty()) c.dependence = parse_list(dependence_arg);
      if (replicates > 0) c.replicates = replicates;
      if (study_n > 0) c.n = study_n;
      if (!study_out.empty()) c.output_dir = study_out;
      c.output_dir = output_path(c.output_dir.string());
      const StudyResult r = run_study(c);
      print_table(r.scores);
      std::size_t failed = 0;
      for (const auto& rec : r.replicates) failed += rec.ok ? 0 : 1;
      if (failed > 0) {
        std::printf("%zu replicate(s) failed; see %s\n", failed,
                    (c.output_dir / "failures.log").string().c_str());
      }
      return 0;
    }

    if (meas->parsed()) {
      const auto grid = default_grid();
      json j;
      if (!chain_csv.empty()) {
        std::vector<GaugeSpline> draws;
        std::ifstream in(chain_csv);
        if (!in) throw std::runtime_error("cannot read " + chain_csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          const auto cells = split_csv_line(line);
          if (cells.size() < kNumSplineParams) throw DomainError("malformed chain row: " + line);
          SplineParams p;
          for (std::size_t i = 0; i < kNumSplineParams; ++i) p[i] = std::stod(cells[i]);
          draws.push_back(GaugeSpline::from_params(p));
        }
        const auto s = posterior_summary(draws, grid, grid);
        j = summary_json(s);
        if (!measures_out.empty()) {
          const fs::path out = output_path(measures_out);
          write_measures_csv(out / "measures.csv", s);
          write_boundary_csv(out / "boundary.csv", s);
          write_text(out / "summary.json", j.dump(2) + "\n");
          return 0;
        }
      } else {
        SplineParams p;
        if (!params_json.empty()) {
          p = spline_params_from_json(json::parse(read_text(params_json)));
        } else {
          const auto v = parse_list(params_arg);
          if (v.size() != kNumSplineParams) throw DomainError("--params needs nine values");
          for (std::size_t i = 0; i < kNumSplineParams; ++i) p[i] = v[i];
        }
        const auto built = build_spline(p);
        if (!built) {
          std::string msg = "invalid spline:";
          for (const auto& v : built.violations) msg += " [" + v + "]";
          throw DomainError(msg);
        }
        const auto d = summarize(*built.spline, grid, grid);
        j["params"] = to_json(p);
        j["eta"] = d.eta;
        j["ad"] = d.ad_indicator;
        j["grid"] = grid;
        j["lambda"] = d.lambda;
        j["tau1"] = d.tau1;
        j["tau2"] = d.tau2;
        if (!measures_out.empty()) {
          write_text(output_path(measures_out) / "measures.json", j.dump(2) + "\n");
          return 0;
        }
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (rep->parsed()) {
      const fs::path dir = report_dir;
      StudyConfig c = study_config_from_json(json::parse(read_text(dir / "study.json"))["config"]);
      const auto records = read_replicates(dir);
      StudyResult r{records, score_replicates(records, c)};
      c.output_dir = dir;
      write_study_report(dir, c, r);
      print_table(r.scores);
      return 0;
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
