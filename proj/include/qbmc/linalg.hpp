#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

namespace qbmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Entrywise clamp to [-c, c]; the Frobenius-nearest matrix with sup-norm <= c.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> clip_project(
    const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar c) {
  if (!(c > 0)) throw std::invalid_argument("clip_project: clip level must be positive");
  return a.derived().cwiseMax(-c).cwiseMin(c);
}

/// Sum of squared entries, accumulated in a fixed column-major order so that
/// identical expressions produce identical floating-point sums.
template <typename Derived>
typename Derived::Scalar frobenius_norm_sq(const Eigen::MatrixBase<Derived>& a) {
  typename Derived::Scalar s{0};
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
  return s;
}

/// Probability weights over the cells of a matrix; weights sum to one.
struct SamplingDistribution {
  Matrix weights;

  static SamplingDistribution uniform(Eigen::Index rows, Eigen::Index cols) {
    return {Matrix::Constant(rows, cols, 1.0 / static_cast<double>(rows * cols))};
  }
};

inline SamplingDistribution make_sampling_distribution(Matrix weights) {
  if ((weights.array() < 0).any())
    throw std::invalid_argument("sampling distribution: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("sampling distribution: weights must sum to 1");
  return {std::move(weights)};
}

/// Weighted squared Frobenius norm  sum_ij P_ij A_ij^2; reduces to
/// frobenius_norm_sq(A)/(rows*cols) under the uniform distribution.
template <typename Derived>
double weighted_frobenius_norm_sq(const Eigen::MatrixBase<Derived>& a,
                                  const SamplingDistribution& p) {
  if (p.weights.rows() != a.rows() || p.weights.cols() != a.cols())
    throw std::invalid_argument("weighted_frobenius_norm_sq: shape mismatch");
  double s = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += p.weights(i, j) * a(i, j) * a(i, j);
  return s;
}

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// 1e-12 * max(rows, cols) * s_max are treated as zero.
inline Matrix pseudo_inverse(const Matrix& a) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = 1e-12 * static_cast<double>(std::max(a.rows(), a.cols())) * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct TruncatedSvd {
  Matrix u;  // rows x r, orthonormal columns
  Vector s;  // r leading singular values, nonincreasing
  Matrix v;  // cols x r, orthonormal columns

  Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Leading rank-r factors of A; u*diag(s)*v^T is the Frobenius-best rank-r
/// approximation.
inline TruncatedSvd truncated_svd(const Matrix& a, Eigen::Index r) {
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("truncated_svd: rank out of range");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(r), svd.singularValues().head(r),
          svd.matrixV().leftCols(r)};
}

}  // namespace qbmc
