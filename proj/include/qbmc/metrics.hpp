#pragma once

#include "qbmc/datagen.hpp"
#include "qbmc/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbmc {

enum class Method { LMC, MALA, OLS, OLSImp };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::LMC: return "LMC";
    case Method::MALA: return "MALA";
    case Method::OLS: return "OLS";
    case Method::OLSImp: return "OLS_imp";
  }
  return "?";
}

/// Per-replication errors of one estimator:
///   est  = |M_hat - M*|_F^2 / (p k)
///   nmse = |M_hat - M*|_F^2 / |M*|_F^2
///   pred = |X (M_hat - M*) Z|_F^2 / (n q)
struct ErrorReport {
  double est = 0;
  double nmse = 0;
  double pred = 0;
  double acceptance_rate = 1.0;
  bool diverged = false;
  Method method = Method::OLS;
  std::uint64_t replication_seed = 0;
};

struct AggregateRow {
  Method method = Method::OLS;
  double est_mean = 0, est_sd = 0;
  double nmse_mean = 0, nmse_sd = 0;
  double pred_mean = 0, pred_sd = 0;
  int n_replications = 0;  // non-divergent replications entering the moments
  int n_diverged = 0;
};

inline ErrorReport compute_errors(const Matrix& m_hat, const GroundTruth& truth,
                                  const DesignPair& designs) {
  if (m_hat.rows() != truth.m_star.rows() || m_hat.cols() != truth.m_star.cols())
    throw std::invalid_argument("compute_errors: estimate shape mismatch");
  const double truth_sq = frobenius_norm_sq(truth.m_star);
  if (truth_sq == 0) throw std::invalid_argument("compute_errors: |M*|_F is zero");
  const Matrix diff = m_hat - truth.m_star;
  const double diff_sq = frobenius_norm_sq(diff);
  ErrorReport out;
  out.est = diff_sq / static_cast<double>(m_hat.rows() * m_hat.cols());
  out.nmse = diff_sq / truth_sq;
  out.pred = frobenius_norm_sq(designs.X * diff * designs.Z) /
             static_cast<double>(designs.n() * designs.q());
  return out;
}

/// Per-method sample means and (n-1)-divisor standard deviations. Divergent
/// replications are excluded from the moments and counted separately.
inline std::vector<AggregateRow> aggregate(const std::vector<ErrorReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  std::vector<AggregateRow> rows;
  for (Method method : {Method::LMC, Method::MALA, Method::OLS, Method::OLSImp}) {
    AggregateRow row;
    row.method = method;
    std::vector<const ErrorReport*> kept;
    for (const ErrorReport& r : reports) {
      if (r.method != method) continue;
      if (r.diverged) {
        ++row.n_diverged;
        continue;
      }
      kept.push_back(&r);
    }
    row.n_replications = static_cast<int>(kept.size());
    if (kept.empty() && row.n_diverged == 0) continue;

    auto moments = [&](auto field, double& mean, double& sd) {
      if (kept.empty()) return;
      double sum = 0;
      for (auto* r : kept) sum += field(*r);
      mean = sum / static_cast<double>(kept.size());
      if (kept.size() > 1) {
        double ss = 0;
        for (auto* r : kept) {
          const double d = field(*r) - mean;
          ss += d * d;
        }
        sd = std::sqrt(ss / static_cast<double>(kept.size() - 1));
      }
    };
    moments([](const ErrorReport& r) { return r.est; }, row.est_mean, row.est_sd);
    moments([](const ErrorReport& r) { return r.nmse; }, row.nmse_mean, row.nmse_sd);
    moments([](const ErrorReport& r) { return r.pred; }, row.pred_mean, row.pred_sd);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("aggregate: no usable reports");
  return rows;
}

}  // namespace qbmc
