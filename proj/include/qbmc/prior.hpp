#pragma once

#include "qbmc/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace qbmc {

/// Spectral scaled Student prior on p x k matrices,
///   pi(M) proportional to det(tau^2 I_p + M M^T)^(-(p+k+2)/2),
/// equivalently prod_j (tau^2 + s_j(M)^2)^(-(p+k+2)/2) over singular values.
/// Densities are handled up to their normalizing constant throughout.
struct PriorParams {
  double tau = 1.0;
  int p = 0;
  int k = 0;
};

namespace detail {

inline void check_prior_shape(const Matrix& m, const PriorParams& params) {
  if (!(params.tau > 0)) throw std::invalid_argument("prior: tau must be positive");
  if (m.rows() != params.p || m.cols() != params.k)
    throw std::invalid_argument("prior: coefficient shape does not match params");
}

inline Eigen::LLT<Matrix> prior_gram_llt(const Matrix& m, const PriorParams& params) {
  Matrix gram = params.tau * params.tau * Matrix::Identity(m.rows(), m.rows());
  gram.noalias() += m * m.transpose();
  return Eigen::LLT<Matrix>(gram);
}

inline double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  double half_log_det = 0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) half_log_det += std::log(l(i, i));
  return 2.0 * half_log_det;
}

}  // namespace detail

/// Log-density up to an additive constant: -((p+k+2)/2) log det(tau^2 I + M M^T).
inline double log_prior(const Matrix& m, const PriorParams& params) {
  detail::check_prior_shape(m, params);
  const auto llt = detail::prior_gram_llt(m, params);
  return -0.5 * static_cast<double>(params.p + params.k + 2) * detail::log_det_from_llt(llt);
}

/// Same quantity evaluated through the singular values of M; an independent
/// route used to cross-check the determinant evaluation.
inline double log_prior_from_singular_values(const Matrix& m, const PriorParams& params) {
  detail::check_prior_shape(m, params);
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const int rmax = static_cast<int>(std::min(m.rows(), m.cols()));
  double log_det = 2.0 * static_cast<double>(params.p - rmax) * std::log(params.tau);
  for (int j = 0; j < rmax; ++j)
    log_det += std::log(params.tau * params.tau + s(j) * s(j));
  return -0.5 * static_cast<double>(params.p + params.k + 2) * log_det;
}

/// Gradient of log_prior: -(p+k+2) (tau^2 I + M M^T)^{-1} M, by Cholesky solve.
inline Matrix grad_log_prior(const Matrix& m, const PriorParams& params) {
  detail::check_prior_shape(m, params);
  const auto llt = detail::prior_gram_llt(m, params);
  return -static_cast<double>(params.p + params.k + 2) * llt.solve(m);
}

/// The precision product B = (tau^2 I + M M^T)^{-1} M obtained as the ridge
/// least-squares minimizer of |I_k - M^T B|_F^2 + tau^2 |B|_F^2, solved on the
/// stacked system [M^T; tau I_p] B = [I_k; 0] by QR. Serves as an alternative
/// backend to the direct solve for large p.
inline Matrix ridge_precision_product(const Matrix& m, const PriorParams& params) {
  detail::check_prior_shape(m, params);
  const Eigen::Index p = m.rows(), k = m.cols();
  Matrix stacked(k + p, p);
  stacked.topRows(k) = m.transpose();
  stacked.bottomRows(p) = params.tau * Matrix::Identity(p, p);
  Matrix rhs = Matrix::Zero(k + p, k);
  rhs.topRows(k).setIdentity();
  return Eigen::HouseholderQR<Matrix>(stacked).solve(rhs);
}

/// One-pass evaluation sharing a single Cholesky factorization between the
/// log-density and its gradient; this is what samplers call per iteration.
struct PriorEvaluation {
  double log_density;
  Matrix grad;
};

inline PriorEvaluation eval_prior(const Matrix& m, const PriorParams& params) {
  detail::check_prior_shape(m, params);
  const auto llt = detail::prior_gram_llt(m, params);
  const double scale = static_cast<double>(params.p + params.k + 2);
  return {-0.5 * scale * detail::log_det_from_llt(llt), -scale * llt.solve(m)};
}

}  // namespace qbmc
