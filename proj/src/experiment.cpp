#include "qbmc/experiment.hpp"

#include "qbmc/baselines.hpp"
#include "qbmc/csv.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qbmc {

namespace {

struct ReplicationOutput {
  std::vector<ErrorReport> reports;
  std::vector<int> restarts;  // parallel to reports; 0 for baselines
  double c1 = 0, c2 = 0, tau_star = 0, lambda_star = 0;
  double bound = 0;
  double chain_pred_error = -1;  // normalized error of the mean predictor
  bool in_bound = false;
  bool coverage_available = false;
  double contraction = -1;  // fraction of post-burn-in samples in the bound set
  long long observed_entries = 0;
};

double max_abs_observed(const ObservationSet& obs) {
  double m = 0;
  for (const Observation& ob : obs.entries) m = std::max(m, std::abs(ob.value));
  return m;
}

int numerical_rank(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-10 * s(0)) ++r;
  return r;
}

double largest_singular_value(const Matrix& m) {
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

double resolve_lambda(const RuleValue& rule, long long observed, double lambda_star) {
  switch (rule.rule) {
    case ValueRule::Auto: return static_cast<double>(observed);
    case ValueRule::Theory: return lambda_star;
    case ValueRule::Fixed: return rule.value;
  }
  return rule.value;
}

double resolve_tau(const RuleValue& rule, double tau_star) {
  switch (rule.rule) {
    case ValueRule::Auto: return 1.0;
    case ValueRule::Theory: return tau_star;
    case ValueRule::Fixed: return rule.value;
  }
  return rule.value;
}

double resolve_clip(const RuleValue& rule, double max_abs_obs) {
  if (rule.rule == ValueRule::Fixed) return rule.value;
  const double scaled = 1.5 * max_abs_obs;
  return scaled > 0 ? scaled : 1.0;
}

nlohmann::json rule_to_json(const RuleValue& rule) {
  switch (rule.rule) {
    case ValueRule::Auto: return "auto";
    case ValueRule::Theory: return "theory";
    case ValueRule::Fixed: return rule.value;
  }
  return nullptr;
}

nlohmann::json report_to_json(const ErrorReport& r, int restarts) {
  return {{"method", method_name(r.method)},
          {"est", r.est},
          {"nmse", r.nmse},
          {"pred", r.pred},
          {"acceptance_rate", r.acceptance_rate},
          {"diverged", r.diverged},
          {"replication_seed", r.replication_seed},
          {"restarts", restarts}};
}

nlohmann::json aggregate_to_json(const AggregateRow& row) {
  return {{"method", method_name(row.method)},
          {"est_mean", row.est_mean},     {"est_sd", row.est_sd},
          {"nmse_mean", row.nmse_mean},   {"nmse_sd", row.nmse_sd},
          {"pred_mean", row.pred_mean},   {"pred_sd", row.pred_sd},
          {"n_replications", row.n_replications},
          {"n_diverged", row.n_diverged}};
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_table(const std::vector<AggregateRow>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-9s %5s %4s %11s %10s %11s %10s %11s %10s\n",
                "method", "reps", "div", "Est(mean)", "Est(sd)", "Nmse(mean)", "Nmse(sd)",
                "Pred(mean)", "Pred(sd)");
  out += line;
  for (const AggregateRow& r : rows) {
    std::snprintf(line, sizeof(line),
                  "%-9s %5d %4d %11.4f %10.4f %11.4f %10.4f %11.4f %10.4f\n",
                  method_name(r.method), r.n_replications, r.n_diverged, r.est_mean,
                  r.est_sd, r.nmse_mean, r.nmse_sd, r.pred_mean, r.pred_sd);
    out += line;
  }
  return out;
}

ReplicationOutput run_replication(const ExperimentConfig& cfg, int rep) {
  const std::uint64_t rep_seed = cfg.master_seed + static_cast<std::uint64_t>(rep);
  const ModelVariant variant =
      cfg.model_variant == 1 ? ModelVariant::ExactLowRank : ModelVariant::ApproxLowRank;

  const DesignPair designs = gen_designs(
      cfg.n, cfg.p, cfg.k, cfg.q, replication_stream_seed(cfg.master_seed, rep, SeedStream::Designs));
  const GroundTruth truth = gen_coefficient(
      cfg.p, cfg.k, variant, replication_stream_seed(cfg.master_seed, rep, SeedStream::Coefficient));
  const Matrix y = gen_response(designs, truth, cfg.noise_sd,
                                replication_stream_seed(cfg.master_seed, rep, SeedStream::Noise));
  const ObservationSet obs =
      cfg.problem == ProblemKind::BLR
          ? observations_from_full(y)
          : sample_observations(y, ObservationMode::MaskedWithoutReplacement, cfg.kappa,
                                replication_stream_seed(cfg.master_seed, rep, SeedStream::Mask));

  ReplicationOutput out;
  out.observed_entries = static_cast<long long>(obs.entries.size());

  const Matrix p_star = designs.X * truth.m_star * designs.Z;
  const double clip_level = resolve_clip(cfg.clip, max_abs_observed(obs));

  // Oracle-bound constants; C must dominate |X M* Z|_inf to satisfy the
  // boundedness assumption, which the clip level does not guarantee.
  TheoryInputs tin;
  tin.sigma = cfg.noise_sd;
  tin.xi = cfg.noise_sd;
  tin.c_level = std::max(clip_level, p_star.cwiseAbs().maxCoeff());
  tin.delta = cfg.delta;
  tin.epsilon = cfg.epsilon;
  tin.n = cfg.n;
  tin.q = cfg.q;
  tin.p = cfg.p;
  tin.k = cfg.k;
  tin.m = out.observed_entries;
  tin.x_norm_f = designs.X.norm();
  tin.z_norm_f = designs.Z.norm();
  const TheoryConstants consts = derive_constants(tin, cfg.problem);
  out.c1 = consts.c1;
  out.c2 = consts.c2;
  out.tau_star = consts.tau_star;
  out.lambda_star = consts.lambda_star;
  out.bound = oracle_bound(tin, consts, truth.m_star.norm(), numerical_rank(truth.m_star),
                           cfg.problem);

  QuasiPosteriorSpec spec;
  spec.designs = designs;
  spec.obs = obs;
  spec.lambda = resolve_lambda(cfg.lambda, out.observed_entries, consts.lambda_star);
  spec.prior = PriorParams{resolve_tau(cfg.tau, consts.tau_star), cfg.p, cfg.k};
  spec.clip_level = clip_level;

  // Baseline: OLS on the full response, imputed OLS otherwise.
  const Matrix m0 = cfg.problem == ProblemKind::BLR
                        ? ols_estimate(y, designs)
                        : ols_imp_estimate(obs, designs,
                                           ImputeConfig{cfg.impute_rank, cfg.impute_iters, 1e-6});
  {
    ErrorReport base = compute_errors(m0, truth, designs);
    base.method = cfg.problem == ProblemKind::BLR ? Method::OLS : Method::OLSImp;
    base.acceptance_rate = 1.0;
    base.replication_seed = rep_seed;
    out.reports.push_back(base);
    out.restarts.push_back(0);
  }

  const double h_auto = auto_step_size(spec);
  const double nq = static_cast<double>(cfg.n) * cfg.q;

  auto chain_report = [&](Method method) {
    SamplerConfig scfg;
    scfg.iterations = cfg.iterations;
    scfg.burn_in = cfg.burn_in;
    scfg.target_acceptance = cfg.target_acceptance;
    scfg.divergence_threshold = cfg.divergence_threshold;

    long long in_set = 0, streamed = 0;
    if (method == Method::MALA) {
      scfg.algorithm = Algorithm::MALA;
      scfg.adapt = cfg.adapt;
      scfg.step_size = cfg.step_size > 0 ? cfg.step_size : h_auto;
      scfg.seed = replication_stream_seed(cfg.master_seed, rep, SeedStream::ChainMala);
      // Posterior-contraction stream: membership of each post-burn-in sample
      // in the oracle-bound set, without storing the samples. Counters reset
      // at iteration 1 so divergence restarts do not mix attempts.
      scfg.observer = [&](const ChainObservation& ob) {
        if (ob.iteration == 1) streamed = in_set = 0;
        if (ob.iteration <= cfg.burn_in) return;
        ++streamed;
        if (frobenius_norm_sq(ob.predictor - p_star) / nq <= out.bound) ++in_set;
      };
    } else {
      scfg.algorithm = Algorithm::LMC;
      scfg.adapt = false;
      // Unadjusted chains carry no acceptance signal to tune on; the
      // dimension-scaled step keeps the discretization bias controlled.
      scfg.step_size = cfg.step_size > 0
                           ? cfg.step_size
                           : h_auto / static_cast<double>(cfg.p * cfg.k);
      scfg.seed = replication_stream_seed(cfg.master_seed, rep, SeedStream::ChainLmc);
    }

    const ChainRun run = run_chain_with_restarts(spec, m0, scfg, cfg.max_restarts);
    const bool usable = !run.result.diverged && run.result.samples_kept > 0;
    ErrorReport report =
        compute_errors(usable ? run.result.posterior_mean_coefficient : m0, truth, designs);
    if (usable && cfg.pred_from_predictor)
      report.pred = frobenius_norm_sq(run.result.posterior_mean_predictor - p_star) / nq;
    report.method = method;
    report.acceptance_rate = run.result.acceptance_rate;
    report.diverged = run.result.diverged;
    report.replication_seed = rep_seed;
    out.reports.push_back(report);
    out.restarts.push_back(run.restarts);

    if (usable) {
      const double err = frobenius_norm_sq(run.result.posterior_mean_predictor - p_star) / nq;
      // Coverage prefers the MALA estimator when both chains run.
      if (method == Method::MALA || !out.coverage_available) {
        out.chain_pred_error = err;
        out.in_bound = err <= out.bound;
        out.coverage_available = true;
      }
      if (method == Method::MALA && streamed > 0)
        out.contraction = static_cast<double>(in_set) / static_cast<double>(streamed);
    }
  };

  if (cfg.run_lmc) chain_report(Method::LMC);
  if (cfg.run_mala) chain_report(Method::MALA);
  return out;
}

}  // namespace

RuleValue parse_rule_value(const std::string& text) {
  if (text == "auto") return {ValueRule::Auto, 0};
  if (text == "theory") return {ValueRule::Theory, 0};
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return {ValueRule::Fixed, v};
  } catch (const std::exception&) {
    throw std::invalid_argument("expected 'auto', 'theory' or a number, got '" + text + "'");
  }
}

double auto_step_size(const QuasiPosteriorSpec& spec) {
  const double data_curvature = 2.0 * spec.lambda /
                                static_cast<double>(spec.obs.entries.size()) *
                                std::pow(largest_singular_value(spec.designs.X), 2) *
                                std::pow(largest_singular_value(spec.designs.Z), 2);
  const double prior_curvature =
      static_cast<double>(spec.prior.p + spec.prior.k + 2) / (spec.prior.tau * spec.prior.tau);
  return 1.0 / (data_curvature + prior_curvature);
}

ChainRun run_chain_with_restarts(const QuasiPosteriorSpec& spec, const Matrix& init,
                                 SamplerConfig cfg, int max_restarts) {
  ChainRun run;
  const QuasiPosteriorTarget target(spec);
  for (;;) {
    run.result = cfg.algorithm == Algorithm::LMC ? run_lmc(target, init, cfg)
                                                 : run_mala(target, init, cfg);
    if (!run.result.diverged || run.restarts >= max_restarts) return run;
    ++run.restarts;
    cfg.step_size *= 0.5;
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  if (cfg.problem == ProblemKind::IMC && (cfg.kappa < 0 || cfg.kappa >= 1))
    throw std::invalid_argument("run_experiment: kappa must lie in [0,1)");
  if (cfg.model_variant != 1 && cfg.model_variant != 2)
    throw std::invalid_argument("run_experiment: model variant must be 1 or 2");

  std::vector<ReplicationOutput> outputs(static_cast<std::size_t>(cfg.reps));
  {
    const int hardware = static_cast<int>(std::thread::hardware_concurrency());
    const int n_threads =
        std::min(cfg.reps, std::max(1, cfg.threads > 0 ? cfg.threads : hardware));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= cfg.reps) return;
        try {
          outputs[static_cast<std::size_t>(i)] = run_replication(cfg, i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  ExperimentResult result;
  nlohmann::json replications = nlohmann::json::array();
  double sum_c1 = 0, sum_c2 = 0, sum_tau = 0, sum_lambda = 0, sum_bound = 0;
  int covered = 0, coverage_n = 0;
  double contraction_sum = 0;
  int contraction_n = 0;
  for (const ReplicationOutput& out : outputs) {
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
      result.replications.push_back(out.reports[i]);
      replications.push_back(report_to_json(out.reports[i], out.restarts[i]));
    }
    sum_c1 += out.c1;
    sum_c2 += out.c2;
    sum_tau += out.tau_star;
    sum_lambda += out.lambda_star;
    sum_bound += out.bound;
    if (out.coverage_available) {
      ++coverage_n;
      covered += out.in_bound ? 1 : 0;
    }
    if (out.contraction >= 0) {
      ++contraction_n;
      contraction_sum += out.contraction;
    }
  }
  result.aggregates = aggregate(result.replications);

  result.theory.c1 = sum_c1 / cfg.reps;
  result.theory.c2 = sum_c2 / cfg.reps;
  result.theory.tau_star = sum_tau / cfg.reps;
  result.theory.lambda_star = sum_lambda / cfg.reps;
  result.theory.bound_at_mstar = sum_bound / cfg.reps;
  result.theory.coverage =
      coverage_n > 0 ? static_cast<double>(covered) / coverage_n : -1;
  result.theory.contraction = contraction_n > 0 ? contraction_sum / contraction_n : -1;

  nlohmann::json aggregates = nlohmann::json::array();
  for (const AggregateRow& row : result.aggregates) aggregates.push_back(aggregate_to_json(row));

  nlohmann::json config = {
      {"problem", cfg.problem == ProblemKind::BLR ? "blr" : "imc"},
      {"n", cfg.n}, {"p", cfg.p}, {"k", cfg.k}, {"q", cfg.q},
      {"model_variant", cfg.model_variant},
      {"noise_sd", cfg.noise_sd},
      {"reps", cfg.reps},
      {"run_lmc", cfg.run_lmc},
      {"run_mala", cfg.run_mala},
      {"iterations", cfg.iterations},
      {"burn_in", cfg.burn_in},
      {"step_size", cfg.step_size > 0 ? nlohmann::json(cfg.step_size) : nlohmann::json("auto")},
      {"adapt", cfg.adapt},
      {"target_acceptance", cfg.target_acceptance},
      {"divergence_threshold", cfg.divergence_threshold},
      {"max_restarts", cfg.max_restarts},
      {"lambda", rule_to_json(cfg.lambda)},
      {"tau", rule_to_json(cfg.tau)},
      {"C", rule_to_json(cfg.clip)},
      {"delta", cfg.delta},
      {"epsilon", cfg.epsilon},
      {"impute_rank", cfg.impute_rank},
      {"impute_iters", cfg.impute_iters},
      {"pred_from_predictor", cfg.pred_from_predictor},
      {"master_seed", cfg.master_seed},
      {"threads", cfg.threads},
      {"observed_entries_per_replication", outputs.empty() ? 0 : outputs.front().observed_entries},
  };
  if (cfg.problem == ProblemKind::IMC) config["kappa"] = cfg.kappa;

  nlohmann::json theory = {
      {"C1", result.theory.c1},
      {"C2", result.theory.c2},
      {"tau_star", result.theory.tau_star},
      {"lambda_star", result.theory.lambda_star},
      {"bound_at_Mstar", result.theory.bound_at_mstar},
      {"coverage", result.theory.coverage >= 0 ? nlohmann::json(result.theory.coverage)
                                               : nlohmann::json(nullptr)},
      {"contraction", result.theory.contraction >= 0
                          ? nlohmann::json(result.theory.contraction)
                          : nlohmann::json(nullptr)},
  };

  result.report = {{"config", std::move(config)},
                   {"theory", std::move(theory)},
                   {"replications", std::move(replications)},
                   {"aggregates", std::move(aggregates)},
                   {"generated_at", timestamp_now()}};
  result.table = format_table(result.aggregates);

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
      std::ofstream json_out(fs::path(cfg.out_dir) / "report.json");
      if (!json_out) throw std::runtime_error(cfg.out_dir + ": cannot write report.json");
      json_out << result.report.dump(2) << '\n';
    }
    {
      std::ofstream table_out(fs::path(cfg.out_dir) / "table.txt");
      if (!table_out) throw std::runtime_error(cfg.out_dir + ": cannot write table.txt");
      table_out << result.table;
    }
  }
  return result;
}

EstimateResult estimate_from_files(const EstimateOptions& opts) {
  if (opts.y_csv.empty() == opts.obs_csv.empty())
    throw std::invalid_argument("estimate: exactly one of a full response file or an "
                                "observation file is required");
  if (opts.method != "ols" && opts.method != "ols_imp" && opts.method != "lmc" &&
      opts.method != "mala")
    throw std::invalid_argument("estimate: unknown method '" + opts.method + "'");

  DesignPair designs;
  designs.X = read_matrix_csv(opts.x_csv);
  designs.Z = read_matrix_csv(opts.z_csv);
  const int n = static_cast<int>(designs.n());
  const int p = static_cast<int>(designs.p());
  const int k = static_cast<int>(designs.k());
  const int q = static_cast<int>(designs.q());

  ObservationSet obs;
  Matrix y_full;
  const bool full_input = !opts.y_csv.empty();
  if (full_input) {
    y_full = read_matrix_csv(opts.y_csv);
    if (y_full.rows() != n || y_full.cols() != q)
      throw std::runtime_error(opts.y_csv + ": response is " + std::to_string(y_full.rows()) +
                               "x" + std::to_string(y_full.cols()) + ", expected " +
                               std::to_string(n) + "x" + std::to_string(q));
    obs = observations_from_full(y_full);
  } else {
    obs = read_observations_csv(opts.obs_csv, n, q);
  }
  if (opts.method == "ols" && !full_input)
    throw std::invalid_argument("estimate: method 'ols' needs the full response; "
                                "use 'ols_imp' for partial observations");

  const double clip_level = resolve_clip(opts.clip, max_abs_observed(obs));
  QuasiPosteriorSpec spec;
  spec.designs = designs;
  spec.obs = obs;
  spec.lambda = opts.lambda.rule == ValueRule::Fixed
                    ? opts.lambda.value
                    : static_cast<double>(obs.entries.size());
  spec.prior = PriorParams{opts.tau, p, k};
  spec.clip_level = clip_level;

  const ImputeConfig impute_cfg{opts.impute_rank, opts.impute_iters, 1e-6};

  EstimateResult result;
  nlohmann::json diag = {
      {"method", opts.method},
      {"n", n}, {"p", p}, {"k", k}, {"q", q},
      {"observed_entries", obs.entries.size()},
      {"lambda", spec.lambda},
      {"tau", opts.tau},
      {"clip_level", clip_level},
  };

  Matrix completed;  // written for partial input
  if (opts.method == "ols") {
    result.m_hat = ols_estimate(y_full, designs);
  } else if (opts.method == "ols_imp") {
    const ImputeResult imputed = impute_low_rank(obs, impute_cfg);
    result.m_hat = ols_estimate(imputed.completed, designs);
    diag["impute_converged"] = imputed.converged;
    diag["impute_iterations"] = imputed.iterations;
    completed = clip_project(designs.X * result.m_hat * designs.Z, clip_level);
  } else {
    const Matrix init = full_input ? ols_estimate(y_full, designs)
                                   : ols_imp_estimate(obs, designs, impute_cfg);
    SamplerConfig scfg;
    scfg.algorithm = opts.method == "lmc" ? Algorithm::LMC : Algorithm::MALA;
    scfg.iterations = opts.iterations;
    scfg.burn_in = opts.burn_in;
    scfg.seed = opts.seed;
    scfg.adapt = opts.method == "mala" && opts.adapt;
    scfg.target_acceptance = opts.target_acceptance;
    scfg.divergence_threshold = opts.divergence_threshold;
    const double h_auto = auto_step_size(spec);
    scfg.step_size = opts.step_size > 0
                         ? opts.step_size
                         : (opts.method == "lmc" ? h_auto / static_cast<double>(p * k)
                                                 : h_auto);

    double log_post_sum = 0, log_post_min = 0, log_post_max = 0;
    long long log_post_n = 0;
    scfg.observer = [&](const ChainObservation& ob) {
      if (ob.iteration == 1) {
        log_post_sum = 0;
        log_post_n = 0;
      }
      if (ob.iteration <= scfg.burn_in) return;
      if (log_post_n == 0) {
        log_post_min = log_post_max = ob.log_density;
      } else {
        log_post_min = std::min(log_post_min, ob.log_density);
        log_post_max = std::max(log_post_max, ob.log_density);
      }
      log_post_sum += ob.log_density;
      ++log_post_n;
    };

    std::ofstream trace_out;
    if (!opts.trace_csv.empty()) {
      trace_out.open(opts.trace_csv);
      if (!trace_out) throw std::runtime_error(opts.trace_csv + ": cannot open for writing");
      trace_out << "iter,log_quasi_posterior,frob_norm_M,accepted\n";
      scfg.trace = &trace_out;
    }

    const ChainRun run = run_chain_with_restarts(spec, init, scfg, opts.max_restarts);
    if (run.result.diverged || run.result.samples_kept == 0)
      result.m_hat = init;
    else
      result.m_hat = run.result.posterior_mean_coefficient;
    diag["initial_step_size"] = scfg.step_size;
    diag["final_step_size"] = run.result.final_step_size;
    diag["restarts"] = run.restarts;
    diag["acceptance_rate"] = run.result.acceptance_rate;
    diag["diverged"] = run.result.diverged;
    diag["samples_kept"] = run.result.samples_kept;
    if (log_post_n > 0)
      diag["log_posterior"] = {{"mean", log_post_sum / static_cast<double>(log_post_n)},
                               {"min", log_post_min},
                               {"max", log_post_max}};
    if (run.result.samples_kept > 0) completed = run.result.posterior_mean_predictor;
  }

  diag["risk_at_estimate"] = empirical_risk(result.m_hat, spec);
  result.diagnostics = std::move(diag);

  namespace fs = std::filesystem;
  fs::create_directories(opts.out_dir);
  write_matrix_csv((fs::path(opts.out_dir) / "m_hat.csv").string(), result.m_hat);
  {
    std::ofstream out(fs::path(opts.out_dir) / "diagnostics.json");
    if (!out) throw std::runtime_error(opts.out_dir + ": cannot write diagnostics.json");
    out << result.diagnostics.dump(2) << '\n';
  }
  if (!full_input && completed.size() > 0)
    write_matrix_csv((fs::path(opts.out_dir) / "completed.csv").string(), completed);
  return result;
}

}  // namespace qbmc
