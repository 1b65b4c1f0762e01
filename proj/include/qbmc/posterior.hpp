#pragma once

#include "qbmc/datagen.hpp"
#include "qbmc/linalg.hpp"
#include "qbmc/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace qbmc {

/// Everything needed to evaluate the quasi-posterior
///   log rho(M) = -lambda * risk(M) + log pi(M)   (up to a constant),
/// over full or partial observations of the response.
struct QuasiPosteriorSpec {
  DesignPair designs;
  ObservationSet obs;
  double lambda = 1.0;      // inverse temperature
  PriorParams prior;
  double clip_level = 1.0;  // truncation level C of the predictor
};

namespace detail {

inline void check_spec(const QuasiPosteriorSpec& spec) {
  if (!(spec.clip_level > 0))
    throw std::invalid_argument("posterior: clip level must be positive");
  if (spec.lambda < 0) throw std::invalid_argument("posterior: lambda must be nonnegative");
  if (spec.obs.entries.empty())
    throw std::invalid_argument("posterior: empty observation set");
  if (spec.obs.n != spec.designs.n() || spec.obs.q != spec.designs.q())
    throw std::invalid_argument("posterior: observation shape does not match designs");
  if (spec.obs.mode == ObservationMode::Full &&
      static_cast<Eigen::Index>(spec.obs.entries.size()) !=
          spec.designs.n() * spec.designs.q())
    throw std::invalid_argument("posterior: full mode must list every cell");
  if (spec.prior.p != spec.designs.p() || spec.prior.k != spec.designs.k())
    throw std::invalid_argument("posterior: prior shape does not match designs");
}

inline void check_coefficient(const Matrix& m, const QuasiPosteriorSpec& spec) {
  if (m.rows() != spec.designs.p() || m.cols() != spec.designs.k())
    throw std::invalid_argument("posterior: coefficient shape mismatch");
}

inline Matrix predict(const Matrix& m, const QuasiPosteriorSpec& spec) {
  return spec.designs.X * m * spec.designs.Z;
}

// Average squared residual against the clipped prediction, summed in entry
// order with plain accumulation so reruns and algebraic identities are exact.
inline double risk_from_prediction(const Matrix& pred, const QuasiPosteriorSpec& spec) {
  const double c = spec.clip_level;
  double sum = 0;
  for (const Observation& ob : spec.obs.entries) {
    const double fitted = std::min(std::max(pred(ob.row, ob.col), -c), c);
    const double d = ob.value - fitted;
    sum += d * d;
  }
  return sum / static_cast<double>(spec.obs.entries.size());
}

// Residuals (with multiplicity) scattered onto the grid, zeroed where the
// prediction is truncation-saturated; the data gradient is then two GEMMs.
inline Matrix grad_data_from_prediction(const Matrix& pred, const QuasiPosteriorSpec& spec) {
  const double c = spec.clip_level;
  Matrix w = Matrix::Zero(pred.rows(), pred.cols());
  for (const Observation& ob : spec.obs.entries) {
    const double fitted = pred(ob.row, ob.col);
    if (std::abs(fitted) < c) w(ob.row, ob.col) += ob.value - fitted;
  }
  const double scale = 2.0 * spec.lambda / static_cast<double>(spec.obs.entries.size());
  return scale * (spec.designs.X.transpose() * w * spec.designs.Z.transpose());
}

}  // namespace detail

/// r(M) for full observations, r'(M) for partial ones: the average squared
/// deviation of observed values from the clipped prediction.
inline double empirical_risk(const Matrix& m, const QuasiPosteriorSpec& spec) {
  detail::check_spec(spec);
  detail::check_coefficient(m, spec);
  return detail::risk_from_prediction(detail::predict(m, spec), spec);
}

inline double log_quasi_posterior(const Matrix& m, const QuasiPosteriorSpec& spec) {
  detail::check_spec(spec);
  detail::check_coefficient(m, spec);
  return -spec.lambda * detail::risk_from_prediction(detail::predict(m, spec), spec) +
         log_prior(m, spec.prior);
}

inline Matrix grad_log_quasi_posterior(const Matrix& m, const QuasiPosteriorSpec& spec) {
  detail::check_spec(spec);
  detail::check_coefficient(m, spec);
  return detail::grad_data_from_prediction(detail::predict(m, spec), spec) +
         grad_log_prior(m, spec.prior);
}

/// What a sampler needs from one evaluation of a target density.
/// `predictor` is whatever the chain should average alongside the coefficient
/// (here the clipped prediction); toy targets may leave it empty.
struct TargetEvaluation {
  double log_density = 0;
  Matrix grad;
  Matrix predictor;
};

/// Caching-free single-pass evaluator: one prediction, one Cholesky, shared
/// between density, gradient and predictor.
class QuasiPosteriorTarget {
 public:
  explicit QuasiPosteriorTarget(const QuasiPosteriorSpec& spec) : spec_(&spec) {
    detail::check_spec(spec);
  }

  TargetEvaluation eval(const Matrix& m) const {
    const QuasiPosteriorSpec& spec = *spec_;
    detail::check_coefficient(m, spec);
    const Matrix pred = detail::predict(m, spec);
    const double risk = detail::risk_from_prediction(pred, spec);
    const PriorEvaluation prior = eval_prior(m, spec.prior);
    TargetEvaluation out;
    out.log_density = -spec.lambda * risk + prior.log_density;
    out.grad = detail::grad_data_from_prediction(pred, spec) + prior.grad;
    out.predictor = clip_project(pred, spec.clip_level);
    return out;
  }

  const QuasiPosteriorSpec& spec() const { return *spec_; }

 private:
  const QuasiPosteriorSpec* spec_;
};

}  // namespace qbmc
