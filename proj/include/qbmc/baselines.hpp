#pragma once

#include "qbmc/datagen.hpp"
#include "qbmc/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qbmc {

/// Generalized ordinary least squares for the bilinear model:
///   M_hat = (X^T X)^+ X^T Y Z^T (Z Z^T)^+ .
/// Pseudo-inverses make rank-deficient designs well defined (the estimate is
/// then the minimum-norm solution on the identifiable subspace).
inline Matrix ols_estimate(const Matrix& y, const DesignPair& designs) {
  if (y.rows() != designs.n() || y.cols() != designs.q())
    throw std::invalid_argument("ols_estimate: response shape does not match designs");
  const Matrix xtx_pinv = pseudo_inverse(designs.X.transpose() * designs.X);
  const Matrix zzt_pinv = pseudo_inverse(designs.Z * designs.Z.transpose());
  return xtx_pinv * designs.X.transpose() * y * designs.Z.transpose() * zzt_pinv;
}

struct ImputeConfig {
  int rank = 2;
  int max_iters = 200;
  double tol = 1e-6;  // relative change of the imputed entries
};

struct ImputeResult {
  Matrix completed;  // observed cells equal the observations exactly
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // |P_Omega(Y - rank-r iterate)|_F^2 per iteration
};

/// Fixed-rank hard-impute: alternate between filling missing cells from the
/// current rank-r approximation and re-truncating the filled matrix.
/// Duplicate observations of a cell are averaged first.
inline ImputeResult impute_low_rank(const ObservationSet& obs, const ImputeConfig& cfg) {
  if (obs.entries.empty()) throw std::invalid_argument("impute_low_rank: no observations");
  const Eigen::Index n = obs.n, q = obs.q;
  if (cfg.rank < 1 || cfg.rank > std::min(n, q))
    throw std::invalid_argument("impute_low_rank: rank out of range");
  if (cfg.max_iters < 1) throw std::invalid_argument("impute_low_rank: max_iters < 1");

  Matrix y_avg = Matrix::Zero(n, q);
  Matrix count = Matrix::Zero(n, q);
  for (const Observation& ob : obs.entries) {
    if (ob.row < 0 || ob.row >= n || ob.col < 0 || ob.col >= q)
      throw std::invalid_argument("impute_low_rank: observation index out of range");
    y_avg(ob.row, ob.col) += ob.value;
    count(ob.row, ob.col) += 1.0;
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> missing;
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      if (count(i, j) > 0)
        y_avg(i, j) /= count(i, j);
      else
        missing.emplace_back(i, j);
    }

  ImputeResult result;
  if (missing.empty()) {
    result.completed = y_avg;
    result.converged = true;
    return result;
  }

  Matrix filled = y_avg;  // missing cells start at zero
  Vector prev_missing = Vector::Zero(static_cast<Eigen::Index>(missing.size()));
  Vector cur_missing(prev_missing.size());
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Matrix approx = truncated_svd(filled, cfg.rank).reconstruct();

    double objective = 0;
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (count(i, j) > 0) {
          const double d = y_avg(i, j) - approx(i, j);
          objective += d * d;
        }
    result.objective_trace.push_back(objective);

    for (std::size_t t = 0; t < missing.size(); ++t) {
      const auto [i, j] = missing[t];
      cur_missing(static_cast<Eigen::Index>(t)) = approx(i, j);
      filled(i, j) = approx(i, j);
    }
    result.iterations = it;
    const double denom = prev_missing.norm();
    const double change = (cur_missing - prev_missing).norm() / (denom > 0 ? denom : 1.0);
    prev_missing = cur_missing;
    if (change < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.completed = filled;  // observed cells were never touched
  return result;
}

/// OLS on the completed response: the baseline for partially observed data.
inline Matrix ols_imp_estimate(const ObservationSet& obs, const DesignPair& designs,
                               const ImputeConfig& cfg) {
  if (obs.n != designs.n() || obs.q != designs.q())
    throw std::invalid_argument("ols_imp_estimate: observation shape mismatch");
  return ols_estimate(impute_low_rank(obs, cfg).completed, designs);
}

}  // namespace qbmc
