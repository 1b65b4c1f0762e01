#pragma once

#include "qbmc/linalg.hpp"
#include "qbmc/random.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qbmc {

/// Known design matrices: X (n x p) acts between rows, Z (k x q) within columns.
struct DesignPair {
  Matrix X;
  Matrix Z;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  Eigen::Index k() const { return Z.rows(); }
  Eigen::Index q() const { return Z.cols(); }
};

enum class ModelVariant { ExactLowRank, ApproxLowRank };

struct GroundTruth {
  Matrix m_star;  // p x k coefficient matrix
  int rank_target = 2;
  ModelVariant variant = ModelVariant::ExactLowRank;
};

enum class ObservationMode { Full, MaskedWithoutReplacement, IidWithReplacement };

struct Observation {
  int row;
  int col;
  double value;
};

/// Observed response entries with the sampling mode they came from.
/// Full mode lists every cell exactly once, in column-major order.
struct ObservationSet {
  std::vector<Observation> entries;
  ObservationMode mode = ObservationMode::Full;
  int n = 0;
  int q = 0;
};

inline ObservationSet observations_from_full(const Matrix& y) {
  ObservationSet out;
  out.mode = ObservationMode::Full;
  out.n = static_cast<int>(y.rows());
  out.q = static_cast<int>(y.cols());
  out.entries.reserve(static_cast<std::size_t>(y.size()));
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      out.entries.push_back({static_cast<int>(i), static_cast<int>(j), y(i, j)});
  return out;
}

/// i.i.d. standard normal designs from a deterministic seeded stream.
inline DesignPair gen_designs(int n, int p, int k, int q, std::uint64_t seed) {
  if (n < 1 || p < 1 || k < 1 || q < 1)
    throw std::invalid_argument("gen_designs: dimensions must be positive");
  DesignPair d;
  d.X.resize(n, p);
  d.Z.resize(k, q);
  Engine eng = make_engine(seed);
  fill_standard_normal(eng, d.X);
  fill_standard_normal(eng, d.Z);
  return d;
}

/// Model variants for the true coefficient matrix:
///   ExactLowRank   M* = B1 B2^T, rank 2, factor entries N(0,1)
///   ApproxLowRank  M* = 2 B1 B2^T + U, U entries N(0, 0.1) (variance 0.1)
inline GroundTruth gen_coefficient(int p, int k, ModelVariant variant, std::uint64_t seed) {
  if (p < 2 || k < 2) throw std::invalid_argument("gen_coefficient: p, k must be >= 2");
  Engine eng = make_engine(seed);
  Matrix b1(p, 2), b2(k, 2);
  fill_standard_normal(eng, b1);
  fill_standard_normal(eng, b2);
  GroundTruth truth;
  truth.rank_target = 2;
  truth.variant = variant;
  if (variant == ModelVariant::ExactLowRank) {
    truth.m_star = b1 * b2.transpose();
  } else {
    Matrix u(p, k);
    fill_standard_normal(eng, u);
    truth.m_star = 2.0 * b1 * b2.transpose() + std::sqrt(0.1) * u;
  }
  return truth;
}

/// Y = X M* Z + E with E entries i.i.d. N(0, noise_sd^2).
inline Matrix gen_response(const DesignPair& designs, const GroundTruth& truth,
                           double noise_sd, std::uint64_t seed) {
  if (designs.p() != truth.m_star.rows() || designs.k() != truth.m_star.cols())
    throw std::invalid_argument("gen_response: design/coefficient shape mismatch");
  if (noise_sd < 0) throw std::invalid_argument("gen_response: negative noise sd");
  Matrix y = designs.X * truth.m_star * designs.Z;
  if (noise_sd > 0) {
    Engine eng = make_engine(seed);
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += noise_sd * standard_normal(eng);
  }
  return y;
}

/// Observation sampling.
///   Full                      all cells; kappa_or_m ignored
///   MaskedWithoutReplacement  keeps ceil((1-kappa) n q) distinct cells,
///                             a uniform subset; kappa_or_m = kappa in [0,1)
///   IidWithReplacement        m uniform cell draws, repeats allowed;
///                             kappa_or_m = m >= 1
inline ObservationSet sample_observations(const Matrix& y, ObservationMode mode,
                                          double kappa_or_m, std::uint64_t seed) {
  const auto n = y.rows();
  const auto q = y.cols();
  if (mode == ObservationMode::Full) return observations_from_full(y);

  ObservationSet out;
  out.mode = mode;
  out.n = static_cast<int>(n);
  out.q = static_cast<int>(q);
  Engine eng = make_engine(seed);

  if (mode == ObservationMode::MaskedWithoutReplacement) {
    const double kappa = kappa_or_m;
    if (kappa < 0 || kappa >= 1)
      throw std::invalid_argument("sample_observations: kappa must lie in [0,1)");
    const auto total = n * q;
    const auto keep = static_cast<Eigen::Index>(
        std::ceil((1.0 - kappa) * static_cast<double>(total)));
    std::vector<Eigen::Index> cells(static_cast<std::size_t>(total));
    std::iota(cells.begin(), cells.end(), Eigen::Index{0});
    // Partial Fisher-Yates: the first `keep` slots become a uniform subset.
    for (Eigen::Index i = 0; i < keep; ++i) {
      const auto j = i + static_cast<Eigen::Index>(
                             uniform_below(eng, static_cast<std::uint64_t>(total - i)));
      std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
    }
    out.entries.reserve(static_cast<std::size_t>(keep));
    for (Eigen::Index t = 0; t < keep; ++t) {
      const auto cell = cells[static_cast<std::size_t>(t)];
      const int i = static_cast<int>(cell % n);
      const int j = static_cast<int>(cell / n);
      out.entries.push_back({i, j, y(i, j)});
    }
    return out;
  }

  const auto m = static_cast<Eigen::Index>(kappa_or_m);
  if (m < 1) throw std::invalid_argument("sample_observations: m must be >= 1");
  out.entries.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto cell =
        static_cast<Eigen::Index>(uniform_below(eng, static_cast<std::uint64_t>(n * q)));
    const int i = static_cast<int>(cell % n);
    const int j = static_cast<int>(cell / n);
    out.entries.push_back({i, j, y(i, j)});
  }
  return out;
}

}  // namespace qbmc
