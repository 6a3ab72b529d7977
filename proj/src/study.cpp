#include "limitset/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "limitset/errors.hpp"
#include "limitset/io.hpp"
#include "limitset/likelihood.hpp"

namespace limitset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

// Runs job(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) job(i);
  };
  const std::size_t k = std::max<std::size_t>(1, std::min(threads, n));
  if (k == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::string scenario_key(CopulaFamily f, double dep) {
  return std::string(to_string(f)) + "," + format_double(dep);
}

}  // namespace

std::string_view to_string(ThresholdScheme scheme) {
  return scheme == ThresholdScheme::Marginal ? "marginal" : "oracle";
}

ThresholdScheme parse_scheme(std::string_view name) {
  if (name == "marginal") return ThresholdScheme::Marginal;
  if (name == "oracle") return ThresholdScheme::Oracle;
  throw DomainError("unknown threshold scheme '" + std::string(name) + "'");
}

FitResult fit_dataset(std::span<const Point2> data, const FitConfig& config,
                      const std::function<double(double)>& oracle_gauge) {
  if (data.size() < 2) {
    throw StageError("input", "need at least two observations, got " + std::to_string(data.size()));
  }
  FitResult fit;
  fit.margins = staged("rank_transform", [&] { return to_exponential_margins(data); });

  fit.polar = staged("threshold", [&] {
    PolarSample marginal = marginal_threshold(fit.margins, config.tau);
    if (config.scheme == ThresholdScheme::Marginal) return marginal;
    if (!oracle_gauge) throw DomainError("oracle threshold needs the true gauge");
    const std::size_t target =
        config.oracle_n_target > 0 ? config.oracle_n_target : marginal.n_exceed;
    return oracle_threshold(fit.margins, config.tau, oracle_gauge, target);
  });
  if (fit.polar.n_exceed < std::max<std::size_t>(1, config.min_exceedances)) {
    throw StageError("threshold", "insufficient exceedances: " +
                                      std::to_string(fit.polar.n_exceed) + " above the " +
                                      format_double(config.tau) + " threshold, need " +
                                      std::to_string(config.min_exceedances));
  }

  const ExceedanceSet exceedances =
      staged("sampler", [&] { return ExceedanceSet(fit.polar); });
  fit.chains = staged("sampler", [&] { return run_chains(&exceedances, config.prior, config.chain); });

  staged("summary", [&] {
    const auto splines = splines_of(fit.chains);
    fit.summary = posterior_summary(splines, config.omega_grid, config.delta_grid, config.n_angles);
    std::vector<std::vector<double>> alphas, etas;
    std::size_t offset = 0;
    for (const auto& c : fit.chains) {
      alphas.emplace_back();
      etas.emplace_back();
      for (const auto& d : c.draws) {
        alphas.back().push_back(d.alpha);
        etas.back().push_back(fit.summary.per_draw[offset++].eta);
      }
    }
    fit.rhat_alpha = split_rhat(alphas);
    fit.rhat_eta = split_rhat(etas);
    return 0;
  });
  return fit;
}

json fit_json(const FitResult& fit) {
  json j = summary_json(fit.summary);
  j["n_total"] = fit.polar.n_total;
  j["n_exceed"] = fit.polar.n_exceed;
  j["tau"] = fit.polar.tau;
  j["rhat_alpha"] = fit.rhat_alpha;
  j["rhat_eta"] = fit.rhat_eta;
  json chains = json::array();
  for (const auto& c : fit.chains) {
    json cj;
    cj["seed"] = c.seed;
    cj["draws"] = c.draws.size();
    json acc = json::object();
    json steps = json::object();
    for (std::size_t i = 0; i < kNumSampled; ++i) {
      const std::string name = i == kAlphaIndex ? "alpha" : std::string(SplineParams::kNames[i]);
      acc[name] = c.acceptance[i];
      steps[name] = c.step_sizes[i];
    }
    cj["acceptance"] = acc;
    cj["step_sizes"] = steps;
    chains.push_back(cj);
  }
  j["chains"] = chains;
  return j;
}

void write_fit(const fs::path& dir, const FitResult& fit) {
  fs::create_directories(dir);
  write_points_csv(dir / "margins.csv", fit.margins);
  write_polar_csv(dir / "polar.csv", fit.polar);
  for (std::size_t c = 0; c < fit.chains.size(); ++c) {
    write_chain_csv(dir / ("chain_" + std::to_string(c) + ".csv"), fit.chains[c]);
  }
  write_measures_csv(dir / "measures.csv", fit.summary);
  write_per_draw_csv(dir / "per_draw.csv", fit.summary);
  write_boundary_csv(dir / "boundary.csv", fit.summary);
  write_text(dir / "summary.json", fit_json(fit).dump(2) + "\n");
}

void StudyConfig::validate() const {
  if (families.empty() || dependence.empty()) throw DomainError("empty study design");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  if (n < 2) throw DomainError("n must be at least 2");
  for (auto f : families) {
    for (double d : dependence) CopulaSpec{f, d, asymmetry}.validate();
  }
  fit.chain.validate();
  fit.prior.validate();
}

json to_json(const StudyConfig& c) {
  json j;
  json fams = json::array();
  for (auto f : c.families) fams.push_back(std::string(to_string(f)));
  j["families"] = fams;
  j["dependence"] = c.dependence;
  j["asymmetry"] = {c.asymmetry.first, c.asymmetry.second};
  j["replicates"] = c.replicates;
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["tau"] = c.fit.tau;
  j["scheme"] = std::string(to_string(c.fit.scheme));
  j["min_exceedances"] = c.fit.min_exceedances;
  const auto& ch = c.fit.chain;
  j["chain"] = {{"iterations", ch.iterations},
                {"burn_in", ch.burn_in},
                {"target_acceptance", ch.target_acceptance},
                {"jump_probability", ch.jump_probability},
                {"initial_step", ch.initial_step},
                {"initial_alpha_step", ch.initial_alpha_step},
                {"chains", ch.chains}};
  json w = json::object();
  for (std::size_t i = 0; i < kNumSplineParams; ++i) {
    const auto& m = c.fit.prior.weights[i];
    w[std::string(SplineParams::kNames[i])] = {m.at_zero, m.uniform, m.at_one};
  }
  j["prior"] = {{"alpha_log_mean", c.fit.prior.alpha_log_mean},
                {"alpha_log_sd", c.fit.prior.alpha_log_sd},
                {"weights", w}};
  return j;
}

StudyConfig study_config_from_json(const json& j, StudyConfig c) {
  if (j.contains("families")) {
    c.families.clear();
    for (const auto& f : j["families"]) c.families.push_back(parse_family(f.get<std::string>()));
  }
  if (j.contains("dependence")) c.dependence = j["dependence"].get<std::vector<double>>();
  if (j.contains("asymmetry")) {
    const auto a = j["asymmetry"].get<std::vector<double>>();
    if (a.size() != 2) throw DomainError("asymmetry needs two weights");
    c.asymmetry = {a[0], a[1]};
  }
  if (j.contains("replicates")) c.replicates = j["replicates"].get<std::size_t>();
  if (j.contains("n")) c.n = j["n"].get<std::size_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("tau")) c.fit.tau = j["tau"].get<double>();
  if (j.contains("scheme")) c.fit.scheme = parse_scheme(j["scheme"].get<std::string>());
  if (j.contains("min_exceedances")) c.fit.min_exceedances = j["min_exceedances"].get<std::size_t>();
  if (j.contains("chain")) {
    const auto& ch = j["chain"];
    auto& cc = c.fit.chain;
    if (ch.contains("iterations")) cc.iterations = ch["iterations"].get<std::size_t>();
    if (ch.contains("burn_in")) cc.burn_in = ch["burn_in"].get<std::size_t>();
    if (ch.contains("target_acceptance")) cc.target_acceptance = ch["target_acceptance"].get<double>();
    if (ch.contains("jump_probability")) cc.jump_probability = ch["jump_probability"].get<double>();
    if (ch.contains("initial_step")) cc.initial_step = ch["initial_step"].get<double>();
    if (ch.contains("initial_alpha_step")) cc.initial_alpha_step = ch["initial_alpha_step"].get<double>();
    if (ch.contains("chains")) cc.chains = ch["chains"].get<std::size_t>();
  }
  if (j.contains("prior")) {
    const auto& p = j["prior"];
    if (p.contains("alpha_log_mean")) c.fit.prior.alpha_log_mean = p["alpha_log_mean"].get<double>();
    if (p.contains("alpha_log_sd")) c.fit.prior.alpha_log_sd = p["alpha_log_sd"].get<double>();
    if (p.contains("weights")) {
      for (std::size_t i = 0; i < kNumSplineParams; ++i) {
        const std::string key(SplineParams::kNames[i]);
        if (!p["weights"].contains(key)) continue;
        const auto w = p["weights"][key].get<std::vector<double>>();
        if (w.size() != 3) throw DomainError("prior weights for " + key + " need three entries");
        c.fit.prior.weights[i] = {w[0], w[1], w[2]};
      }
    }
  }
  return c;
}

std::uint64_t dataset_seed(std::uint64_t master, CopulaFamily family, double dependence,
                           std::size_t replicate) {
  const auto dep_code = static_cast<std::uint64_t>(std::llround(dependence * 1e6));
  std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(family));
  s = derive_seed(s, dep_code);
  return derive_seed(s, replicate);
}

double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw DomainError("rmse of an empty set");
  double acc = 0.0;
  for (double e : estimates) acc += (e - truth) * (e - truth);
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

double rmise(std::span<const std::vector<double>> estimates, std::span<const double> truth) {
  if (estimates.empty()) throw DomainError("rmise of an empty set");
  if (truth.empty()) throw DomainError("rmise needs a nonempty grid");
  double acc = 0.0;
  for (const auto& est : estimates) {
    if (est.size() != truth.size()) throw DomainError("rmise grid mismatch");
    double grid_mean = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      grid_mean += (est[i] - truth[i]) * (est[i] - truth[i]);
    }
    acc += grid_mean / static_cast<double>(truth.size());
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

std::vector<ScenarioScore> score_replicates(std::span<const ReplicateRecord> records,
                                            const StudyConfig& config) {
  std::vector<ScenarioScore> out;
  for (auto f : config.families) {
    for (double dep : config.dependence) {
      const CopulaSpec spec{f, dep, config.asymmetry};
      const auto truth = analytic_measures(spec, config.fit.omega_grid, config.fit.delta_grid);
      ScenarioScore s;
      s.family = f;
      s.dependence = dep;
      s.true_eta = truth.eta;
      std::vector<double> etas;
      std::vector<std::vector<double>> lambdas, taus;
      std::size_t covered = 0;
      for (const auto& r : records) {
        if (r.family != f || r.dependence != dep) continue;
        if (!r.ok) {
          ++s.failed;
          continue;
        }
        ++s.fitted;
        etas.push_back(r.eta_median);
        lambdas.push_back(r.lambda_median);
        taus.push_back(r.tau1_median);
        if (r.eta_median == 1.0) ++s.ad_count;
        if (r.eta_lower <= truth.eta && truth.eta <= r.eta_upper) ++covered;
      }
      if (s.fitted > 0) {
        double sum = 0.0;
        for (double e : etas) sum += e;
        s.mean_eta_median = sum / static_cast<double>(s.fitted);
        s.rmse_eta = rmse(etas, truth.eta);
        s.rmise_lambda = rmise(lambdas, truth.lambda);
        s.rmise_tau1 = rmise(taus, truth.tau1);
        s.coverage_eta = static_cast<double>(covered) / static_cast<double>(s.fitted);
      } else {
        s.mean_eta_median = s.rmse_eta = s.rmise_lambda = s.rmise_tau1 = s.coverage_eta =
            std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(s);
    }
  }
  return out;
}

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  struct Job {
    CopulaFamily family;
    double dependence;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (auto f : config.families) {
    for (double d : config.dependence) {
      for (std::size_t r = 0; r < config.replicates; ++r) jobs.push_back({f, d, r});
    }
  }

  StudyResult result;
  result.replicates.resize(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    ReplicateRecord rec;
    rec.family = job.family;
    rec.dependence = job.dependence;
    rec.replicate = job.replicate;
    try {
      const CopulaSpec spec{job.family, job.dependence, config.asymmetry};
      const std::uint64_t seed = dataset_seed(config.seed, job.family, job.dependence, job.replicate);
      const auto data = staged("simulate", [&] { return sample(spec, config.n, seed); });
      FitConfig fc = config.fit;
      fc.chain.seed = derive_seed(seed, 0x51a1);
      auto gauge = [&spec](double w) { return analytic_gauge(spec, {w, 1.0 - w}); };
      const FitResult fit = fit_dataset(data, fc, gauge);
      rec.ok = true;
      rec.n_exceed = fit.polar.n_exceed;
      rec.eta_median = fit.summary.eta_median;
      rec.eta_lower = fit.summary.eta_lower;
      rec.eta_upper = fit.summary.eta_upper;
      rec.prob_ad = fit.summary.prob_ad;
      rec.rhat_alpha = fit.rhat_alpha;
      rec.rhat_eta = fit.rhat_eta;
      rec.min_acceptance = 1.0;
      rec.max_acceptance = 0.0;
      for (const auto& c : fit.chains) {
        for (double a : c.acceptance) {
          if (std::isnan(a)) continue;
          rec.min_acceptance = std::min(rec.min_acceptance, a);
          rec.max_acceptance = std::max(rec.max_acceptance, a);
        }
      }
      rec.lambda_median = fit.summary.lambda_median;
      rec.tau1_median = fit.summary.tau1_median;
    } catch (const StageError& e) {
      rec.error_stage = e.stage();
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.error_stage = "unknown";
      rec.error = e.what();
    }
    result.replicates[i] = std::move(rec);
  });
  result.scores = score_replicates(result.replicates, config);
  write_study_report(config.output_dir, config, result);
  return result;
}

void write_study_report(const fs::path& dir, const StudyConfig& config, const StudyResult& res) {
  fs::create_directories(dir);
  std::ostringstream reps, curves, fails;
  reps << "family,dependence,replicate,status,error_stage,n_exceed,eta_median,eta_lower,"
          "eta_upper,prob_ad,rhat_alpha,rhat_eta,min_acceptance,max_acceptance\n";
  curves << "family,dependence,replicate,measure,grid,value\n";
  for (const auto& r : res.replicates) {
    const std::string key = scenario_key(r.family, r.dependence) + "," + std::to_string(r.replicate);
    reps << key << ',' << (r.ok ? "ok" : "failed") << ',' << r.error_stage << ',' << r.n_exceed
         << ',' << format_double(r.eta_median) << ',' << format_double(r.eta_lower) << ','
         << format_double(r.eta_upper) << ',' << format_double(r.prob_ad) << ','
         << format_double(r.rhat_alpha) << ',' << format_double(r.rhat_eta) << ','
         << format_double(r.min_acceptance) << ',' << format_double(r.max_acceptance) << '\n';
    if (!r.ok) {
      fails << key << ' ' << r.error << '\n';
      continue;
    }
    for (std::size_t i = 0; i < r.lambda_median.size(); ++i) {
      curves << key << ",lambda," << format_double(config.fit.omega_grid[i]) << ','
             << format_double(r.lambda_median[i]) << '\n';
    }
    for (std::size_t i = 0; i < r.tau1_median.size(); ++i) {
      curves << key << ",tau1," << format_double(config.fit.delta_grid[i]) << ','
             << format_double(r.tau1_median[i]) << '\n';
    }
  }

  std::ostringstream scores, counts;
  scores << "family,dependence,fitted,failed,ad_count,mean_eta_median,true_eta,rmse_eta,"
            "rmise_lambda,rmise_tau1,coverage_eta\n";
  counts << "family,dependence,ad_count,fitted\n";
  json jscores = json::array();
  for (const auto& s : res.scores) {
    scores << scenario_key(s.family, s.dependence) << ',' << s.fitted << ',' << s.failed << ','
           << s.ad_count << ',' << format_double(s.mean_eta_median) << ','
           << format_double(s.true_eta) << ',' << format_double(s.rmse_eta) << ','
           << format_double(s.rmise_lambda) << ',' << format_double(s.rmise_tau1) << ','
           << format_double(s.coverage_eta) << '\n';
    counts << scenario_key(s.family, s.dependence) << ',' << s.ad_count << ',' << s.fitted << '\n';
    jscores.push_back({{"family", std::string(to_string(s.family))},
                       {"dependence", s.dependence},
                       {"fitted", s.fitted},
                       {"failed", s.failed},
                       {"ad_count", s.ad_count},
                       {"mean_eta_median", s.mean_eta_median},
                       {"true_eta", s.true_eta},
                       {"rmse_eta", s.rmse_eta},
                       {"rmise_lambda", s.rmise_lambda},
                       {"rmise_tau1", s.rmise_tau1},
                       {"coverage_eta", s.coverage_eta}});
  }
  json j;
  j["config"] = to_json(config);
  j["scores"] = jscores;

  write_text(dir / "replicates.csv", reps.str());
  write_text(dir / "curves.csv", curves.str());
  write_text(dir / "scores.csv", scores.str());
  write_text(dir / "ad_counts.csv", counts.str());
  write_text(dir / "failures.log", fails.str());
  write_text(dir / "study.json", j.dump(2) + "\n");
}

std::vector<ReplicateRecord> read_replicates(const fs::path& dir) {
  std::ifstream in(dir / "replicates.csv");
  if (!in) throw std::runtime_error("cannot read " + (dir / "replicates.csv").string());
  std::vector<ReplicateRecord> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 14) throw DomainError("malformed replicates.csv row: " + line);
    ReplicateRecord r;
    r.family = parse_family(c[0]);
    r.dependence = std::stod(c[1]);
    r.replicate = std::stoul(c[2]);
    r.ok = c[3] == "ok";
    r.error_stage = c[4];
    r.n_exceed = std::stoul(c[5]);
    r.eta_median = std::stod(c[6]);
    r.eta_lower = std::stod(c[7]);
    r.eta_upper = std::stod(c[8]);
    r.prob_ad = std::stod(c[9]);
    r.rhat_alpha = std::stod(c[10]);
    r.rhat_eta = std::stod(c[11]);
    r.min_acceptance = std::stod(c[12]);
    r.max_acceptance = std::stod(c[13]);
    index[c[0] + "," + c[1] + "," + c[2]] = out.size();
    out.push_back(std::move(r));
  }
  std::ifstream cin(dir / "curves.csv");
  if (!cin) return out;
  std::getline(cin, line);
  while (std::getline(cin, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 6) throw DomainError("malformed curves.csv row: " + line);
    auto it = index.find(c[0] + "," + c[1] + "," + c[2]);
    if (it == index.end()) continue;
    auto& r = out[it->second];
    (c[3] == "lambda" ? r.lambda_median : r.tau1_median).push_back(std::stod(c[5]));
  }
  return out;
}

std::size_t fit_batch(const fs::path& dir, const fs::path& dir_out, const FitConfig& config,
                      std::size_t threads) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> rows(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) {
    const auto& f = files[i];
    std::ostringstream row;
    row << f.filename().string() << ',';
    try {
      const auto data = staged("input", [&] { return read_points_csv(f); });
      FitConfig fc = config;
      fc.chain.seed = derive_seed(config.chain.seed, i);
      const FitResult fit = fit_dataset(data, fc);
      write_fit(dir_out / f.stem(), fit);
      row << "ok,," << fit.polar.n_total << ',' << fit.polar.n_exceed << ','
          << format_double(fit.summary.eta_median) << ',' << format_double(fit.summary.eta_lower)
          << ',' << format_double(fit.summary.eta_upper) << ','
          << format_double(fit.summary.prob_ad) << ',' << format_double(fit.rhat_alpha) << ','
          << format_double(fit.rhat_eta);
    } catch (const StageError& e) {
      row << "failed," << e.stage() << ",,,,,,,,";
      errors[i] = f.filename().string() + " " + e.what();
    } catch (const std::exception& e) {
      row << "failed,output,,,,,,,,";
      errors[i] = f.filename().string() + " " + e.what();
    }
    rows[i] = row.str();
  });
  std::ostringstream out, log;
  out << "file,status,error_stage,n,n_exceed,eta_median,eta_lower,eta_upper,prob_ad,rhat_alpha,"
         "rhat_eta\n";
  std::size_t failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i] << '\n';
    if (!errors[i].empty()) {
      ++failed;
      log << errors[i] << '\n';
    }
  }
  write_text(dir_out / "batch_summary.csv", out.str());
  write_text(dir_out / "failures.log", log.str());
  return failed;
}

}  // namespace limitset
