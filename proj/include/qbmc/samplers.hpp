#pragma once

#include "qbmc/posterior.hpp"
#include "qbmc/random.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace qbmc {

enum class Algorithm { LMC, MALA };

/// Snapshot handed to an observer after every iteration. References stay
/// valid only for the duration of the callback.
struct ChainObservation {
  int iteration;  // 1-based
  const Matrix& coefficient;
  const Matrix& predictor;  // empty when the target provides none
  double log_density;
  bool accepted;
};

struct SamplerConfig {
  double step_size = 1e-4;
  int iterations = 10000;
  int burn_in = 1000;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::MALA;
  bool adapt = true;                    // MALA only; step frozen after burn-in
  double target_acceptance = 0.5;
  double divergence_threshold = 1e8;    // on |M|_F
  int adapt_window = 50;
  std::ostream* trace = nullptr;        // optional CSV: iter,log_density,frob_norm,accepted
  std::function<void(const ChainObservation&)> observer;
};

struct ChainResult {
  Matrix posterior_mean_predictor;   // average of clipped predictions, post burn-in
  Matrix posterior_mean_coefficient; // average of M_t, post burn-in
  double acceptance_rate = 1.0;      // MALA; LMC reports 1.0
  bool diverged = false;
  int samples_kept = 0;
  double final_step_size = 0;
};

/// Burn-in step-size update: multiply by exp(0.5 (rate - target)) where rate
/// is the acceptance fraction over the last window.
inline double adapt_step_size(int accepted_in_window, int window_size, double h,
                              double target) {
  if (!(target > 0 && target < 1))
    throw std::invalid_argument("adapt_step_size: target must lie in (0,1)");
  if (window_size < 1) throw std::invalid_argument("adapt_step_size: empty window");
  const double rate = static_cast<double>(accepted_in_window) / window_size;
  return h * std::exp(0.5 * (rate - target));
}

namespace detail {

inline void check_chain_config(const SamplerConfig& cfg, const Matrix& init) {
  if (!(cfg.step_size > 0)) throw std::invalid_argument("sampler: step size must be positive");
  if (cfg.iterations < 1) throw std::invalid_argument("sampler: iterations must be positive");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
    throw std::invalid_argument("sampler: burn-in must lie in [0, iterations)");
  if (init.size() == 0) throw std::invalid_argument("sampler: empty initial state");
}

struct ChainAccumulator {
  Matrix sum_coefficient;
  Matrix sum_predictor;
  int kept = 0;

  void add(const Matrix& m, const Matrix& predictor) {
    if (kept == 0) {
      sum_coefficient = m;
      if (predictor.size() > 0) sum_predictor = predictor;
    } else {
      sum_coefficient += m;
      if (predictor.size() > 0) sum_predictor += predictor;
    }
    ++kept;
  }

  void finalize(ChainResult& result, Eigen::Index p, Eigen::Index k) const {
    result.samples_kept = kept;
    if (kept > 0) {
      result.posterior_mean_coefficient = sum_coefficient / kept;
      if (sum_predictor.size() > 0)
        result.posterior_mean_predictor = sum_predictor / kept;
    } else {
      result.posterior_mean_coefficient = Matrix::Zero(p, k);
    }
  }
};

inline void write_trace(std::ostream* trace, int iter, double log_density,
                        double frob_norm, bool accepted) {
  if (trace) *trace << iter << ',' << log_density << ',' << frob_norm << ','
                    << (accepted ? 1 : 0) << '\n';
}

inline bool state_diverged(const Matrix& m, double log_density, double threshold) {
  return !std::isfinite(log_density) || !m.allFinite() || m.norm() > threshold;
}

}  // namespace detail

/// Unadjusted Langevin chain: M <- M + h grad log rho(M) + sqrt(2h) N.
/// Divergence is reported, not thrown; the caller may restart with smaller h.
template <class Target>
ChainResult run_lmc(const Target& target, Matrix state, const SamplerConfig& cfg) {
  detail::check_chain_config(cfg, state);
  Engine eng = make_engine(cfg.seed);
  const double h = cfg.step_size;
  const double noise_scale = std::sqrt(2.0 * h);

  ChainResult result;
  result.final_step_size = h;
  detail::ChainAccumulator acc;

  TargetEvaluation eval = target.eval(state);
  if (detail::state_diverged(state, eval.log_density, cfg.divergence_threshold)) {
    result.diverged = true;
    acc.finalize(result, state.rows(), state.cols());
    return result;
  }

  Matrix noise(state.rows(), state.cols());
  for (int t = 1; t <= cfg.iterations; ++t) {
    fill_standard_normal(eng, noise);
    state += h * eval.grad + noise_scale * noise;
    eval = target.eval(state);
    if (detail::state_diverged(state, eval.log_density, cfg.divergence_threshold)) {
      result.diverged = true;
      break;
    }
    if (t > cfg.burn_in) acc.add(state, eval.predictor);
    detail::write_trace(cfg.trace, t, eval.log_density, state.norm(), true);
    if (cfg.observer)
      cfg.observer({t, state, eval.predictor, eval.log_density, true});
  }

  result.acceptance_rate = 1.0;
  acc.finalize(result, state.rows(), state.cols());
  return result;
}

/// Metropolis-adjusted Langevin chain. The Langevin update proposes
///   M~ = M + h grad log rho(M) + sqrt(2h) N,
/// accepted with probability min{1, rho(M~) q(M|M~) / (rho(M) q(M~|M))},
/// log q(x'|x) = -|x' - x - h grad log rho(x)|_F^2 / (4h) + const.
/// Everything is computed in log space. With cfg.adapt, the step size is
/// tuned toward cfg.target_acceptance during burn-in and frozen afterwards.
template <class Target>
ChainResult run_mala(const Target& target, Matrix state, const SamplerConfig& cfg) {
  detail::check_chain_config(cfg, state);
  Engine eng = make_engine(cfg.seed);
  double h = cfg.step_size;

  ChainResult result;
  detail::ChainAccumulator acc;

  TargetEvaluation eval = target.eval(state);
  if (detail::state_diverged(state, eval.log_density, cfg.divergence_threshold)) {
    result.diverged = true;
    result.final_step_size = h;
    acc.finalize(result, state.rows(), state.cols());
    return result;
  }

  Matrix noise(state.rows(), state.cols());
  int accepted_post = 0, executed_post = 0, window_accepts = 0;

  for (int t = 1; t <= cfg.iterations; ++t) {
    fill_standard_normal(eng, noise);
    const Matrix proposal = state + h * eval.grad + std::sqrt(2.0 * h) * noise;
    const TargetEvaluation prop_eval = target.eval(proposal);

    bool accepted = false;
    if (proposal.allFinite() && std::isfinite(prop_eval.log_density)) {
      const double log_fwd = -(proposal - state - h * eval.grad).squaredNorm() / (4.0 * h);
      const double log_bwd = -(state - proposal - h * prop_eval.grad).squaredNorm() / (4.0 * h);
      const double log_alpha =
          prop_eval.log_density - eval.log_density + log_bwd - log_fwd;
      accepted = std::log(uniform_open01(eng)) < log_alpha;
    }
    if (accepted) {
      state = proposal;
      eval = prop_eval;
    }

    if (detail::state_diverged(state, eval.log_density, cfg.divergence_threshold)) {
      result.diverged = true;
      break;
    }

    if (t <= cfg.burn_in) {
      if (cfg.adapt) {
        window_accepts += accepted ? 1 : 0;
        if (t % cfg.adapt_window == 0) {
          h = adapt_step_size(window_accepts, cfg.adapt_window, h, cfg.target_acceptance);
          window_accepts = 0;
        }
      }
    } else {
      ++executed_post;
      accepted_post += accepted ? 1 : 0;
      acc.add(state, eval.predictor);
    }

    detail::write_trace(cfg.trace, t, eval.log_density, state.norm(), accepted);
    if (cfg.observer)
      cfg.observer({t, state, eval.predictor, eval.log_density, accepted});
  }

  result.acceptance_rate =
      executed_post > 0 ? static_cast<double>(accepted_post) / executed_post : 0.0;
  result.final_step_size = h;
  acc.finalize(result, state.rows(), state.cols());
  return result;
}

inline ChainResult lmc_run(const QuasiPosteriorSpec& spec, const Matrix& init,
                           const SamplerConfig& cfg) {
  if (cfg.algorithm != Algorithm::LMC)
    throw std::invalid_argument("lmc_run: config selects a different algorithm");
  return run_lmc(QuasiPosteriorTarget(spec), init, cfg);
}

inline ChainResult mala_run(const QuasiPosteriorSpec& spec, const Matrix& init,
                            const SamplerConfig& cfg) {
  if (cfg.algorithm != Algorithm::MALA)
    throw std::invalid_argument("mala_run: config selects a different algorithm");
  return run_mala(QuasiPosteriorTarget(spec), init, cfg);
}

}  // namespace qbmc
