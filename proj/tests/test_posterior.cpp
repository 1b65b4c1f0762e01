#include "qbmc/posterior.hpp"
#include "qbmc/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using qbmc::Matrix;
using qbmc::ObservationMode;
using qbmc::QuasiPosteriorSpec;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  qbmc::Engine eng = qbmc::make_engine(seed);
  Matrix m(rows, cols);
  qbmc::fill_standard_normal(eng, m);
  return m;
}

QuasiPosteriorSpec make_spec(int n, int p, int k, int q, double noise_sd, double lambda,
                             double tau, double clip, std::uint64_t seed) {
  QuasiPosteriorSpec spec;
  spec.designs = qbmc::gen_designs(n, p, k, q, seed);
  const auto truth = qbmc::gen_coefficient(p, k, qbmc::ModelVariant::ExactLowRank, seed + 1);
  const Matrix y = qbmc::gen_response(spec.designs, truth, noise_sd, seed + 2);
  spec.obs = qbmc::observations_from_full(y);
  spec.lambda = lambda;
  spec.prior = qbmc::PriorParams{tau, p, k};
  spec.clip_level = clip;
  return spec;
}

Matrix fd_grad(const Matrix& m, const QuasiPosteriorSpec& spec, double step) {
  Matrix g(m.rows(), m.cols());
  Matrix probe = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      probe(i, j) = m(i, j) + step;
      const double up = qbmc::log_quasi_posterior(probe, spec);
      probe(i, j) = m(i, j) - step;
      const double down = qbmc::log_quasi_posterior(probe, spec);
      probe(i, j) = m(i, j);
      g(i, j) = (up - down) / (2 * step);
    }
  return g;
}

}  // namespace

TEST_CASE("empirical_risk basics") {
  // Noiseless data at the truth with inactive truncation has zero risk.
  auto spec = make_spec(6, 3, 4, 5, 0.0, 2.0, 1.0, 1.0, 10);
  const auto truth = qbmc::gen_coefficient(3, 4, qbmc::ModelVariant::ExactLowRank, 11);
  const Matrix y = spec.designs.X * truth.m_star * spec.designs.Z;
  spec.obs = qbmc::observations_from_full(y);
  spec.clip_level = 2.0 * y.cwiseAbs().maxCoeff();
  CHECK(qbmc::empirical_risk(truth.m_star, spec) == 0.0);

  // 1x1: Y=6, X=1, Z=3, M=1, C=10 -> (6-3)^2.
  QuasiPosteriorSpec tiny;
  tiny.designs = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 3.0)};
  tiny.obs = qbmc::observations_from_full(Matrix::Constant(1, 1, 6.0));
  tiny.lambda = 1.0;
  tiny.prior = qbmc::PriorParams{1.0, 1, 1};
  tiny.clip_level = 10.0;
  CHECK(qbmc::empirical_risk(Matrix::Constant(1, 1, 1.0), tiny) == doctest::Approx(9.0));

  tiny.obs.entries.clear();
  CHECK_THROWS_AS(qbmc::empirical_risk(Matrix::Constant(1, 1, 1.0), tiny),
                  std::invalid_argument);
}

TEST_CASE("full risk equals a with-replacement sample enumerating every cell") {
  auto spec = make_spec(5, 3, 4, 6, 1.0, 3.0, 1.0, 50.0, 20);
  const Matrix m = random_matrix(3, 4, 21);
  const double full_risk = qbmc::empirical_risk(m, spec);

  QuasiPosteriorSpec iid = spec;
  iid.obs.mode = ObservationMode::IidWithReplacement;
  // Same cells, shuffled order, still one draw per cell.
  qbmc::Engine eng = qbmc::make_engine(22);
  for (std::size_t i = iid.obs.entries.size(); i > 1; --i)
    std::swap(iid.obs.entries[i - 1],
              iid.obs.entries[qbmc::uniform_below(eng, i)]);
  const double iid_risk = qbmc::empirical_risk(m, iid);
  CHECK(iid_risk == doctest::Approx(full_risk).epsilon(1e-12));
}

TEST_CASE("with-replacement draws count with multiplicity") {
  QuasiPosteriorSpec spec;
  spec.designs = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0)};
  spec.obs.mode = ObservationMode::IidWithReplacement;
  spec.obs.n = 1;
  spec.obs.q = 1;
  spec.obs.entries = {{0, 0, 3.0}, {0, 0, 3.0}, {0, 0, 6.0}};
  spec.lambda = 2.0;
  spec.prior = qbmc::PriorParams{1.0, 1, 1};
  spec.clip_level = 100.0;

  const Matrix m = Matrix::Constant(1, 1, 1.0);
  // Residuals 2, 2, 5 averaged over the three draws.
  CHECK(qbmc::empirical_risk(m, spec) == doctest::Approx((4.0 + 4.0 + 25.0) / 3.0));

  // Data gradient: (2 lambda / m) sum of residuals, since X = Z = 1.
  const Matrix g = qbmc::grad_log_quasi_posterior(m, spec);
  const double expected =
      2.0 * spec.lambda / 3.0 * (2.0 + 2.0 + 5.0) + qbmc::grad_log_prior(m, spec.prior)(0, 0);
  CHECK(g(0, 0) == doctest::Approx(expected));
}

TEST_CASE("empirical_risk is invariant to entry permutation") {
  auto spec = make_spec(7, 3, 3, 5, 1.0, 3.0, 1.0, 50.0, 30);
  spec.obs.mode = ObservationMode::MaskedWithoutReplacement;
  spec.obs.entries.resize(20);
  const Matrix m = random_matrix(3, 3, 31);
  const double base = qbmc::empirical_risk(m, spec);
  std::reverse(spec.obs.entries.begin(), spec.obs.entries.end());
  CHECK(qbmc::empirical_risk(m, spec) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("log_quasi_posterior composition") {
  auto spec = make_spec(6, 4, 3, 5, 1.0, 0.0, 0.8, 40.0, 40);
  const Matrix m = random_matrix(4, 3, 41);
  CHECK(qbmc::log_quasi_posterior(m, spec) ==
        doctest::Approx(qbmc::log_prior(m, spec.prior)));

  // All-zero data at M = 0 with tau = 1: both terms vanish.
  QuasiPosteriorSpec zero;
  zero.designs = {Matrix::Constant(2, 2, 1.0), Matrix::Constant(2, 2, 1.0)};
  zero.obs = qbmc::observations_from_full(Matrix::Zero(2, 2));
  zero.lambda = 5.0;
  zero.prior = qbmc::PriorParams{1.0, 2, 2};
  zero.clip_level = 1.0;
  CHECK(qbmc::log_quasi_posterior(Matrix::Zero(2, 2), zero) == doctest::Approx(0.0));

  // Differences are normalization-free and recompute term by term.
  spec.lambda = 7.0;
  const Matrix m1 = random_matrix(4, 3, 42);
  const Matrix m2 = random_matrix(4, 3, 43);
  const double diff =
      qbmc::log_quasi_posterior(m1, spec) - qbmc::log_quasi_posterior(m2, spec);
  const double recomputed =
      -spec.lambda * (qbmc::empirical_risk(m1, spec) - qbmc::empirical_risk(m2, spec)) +
      (qbmc::log_prior(m1, spec.prior) - qbmc::log_prior(m2, spec.prior));
  CHECK(diff == doctest::Approx(recomputed).epsilon(1e-10));
}

TEST_CASE("gradient reduces to the prior term when data cannot move") {
  auto spec = make_spec(5, 3, 4, 4, 1.0, 4.0, 1.0, 30.0, 50);
  const Matrix m = random_matrix(3, 4, 51);

  // Saturated truncation kills the data term entirely.
  QuasiPosteriorSpec saturated = spec;
  saturated.clip_level = 1e-9;
  CHECK(qbmc::grad_log_quasi_posterior(m, saturated) ==
        qbmc::grad_log_prior(m, saturated.prior));

  QuasiPosteriorSpec cold = spec;
  cold.lambda = 0.0;
  CHECK(qbmc::grad_log_quasi_posterior(m, cold) == qbmc::grad_log_prior(m, cold.prior));
}

TEST_CASE("gradient matches central finite differences at interior points") {
  for (int trial = 0; trial < 5; ++trial) {
    auto spec = make_spec(6, 3 + trial % 3, 3, 5, 1.0, 2.5, 0.9, 1.0, 60 + trial);
    const Matrix m = 0.3 * random_matrix(3 + trial % 3, 3, 70 + trial);
    // Keep every cell well inside the truncation region.
    const Matrix pred = spec.designs.X * m * spec.designs.Z;
    spec.clip_level = 2.0 * pred.cwiseAbs().maxCoeff() + 1.0;
    const Matrix g = qbmc::grad_log_quasi_posterior(m, spec);
    const Matrix fd = fd_grad(m, spec, 1e-5);
    CHECK((g - fd).norm() <= 1e-4 * fd.norm());
  }
}

TEST_CASE("masked gradient over a full enumeration equals the closed form") {
  auto spec = make_spec(6, 4, 3, 5, 1.0, 3.0, 1.0, 25.0, 80);
  const Matrix m = random_matrix(4, 3, 81);

  QuasiPosteriorSpec masked = spec;
  masked.obs.mode = ObservationMode::MaskedWithoutReplacement;
  const Matrix via_entries = qbmc::grad_log_quasi_posterior(m, masked);

  // Closed form: (2 lambda / nq) X^T [(Y - XMZ) .* 1{|XMZ| < C}] Z^T + prior.
  Matrix y(6, 5);
  for (const auto& ob : spec.obs.entries) y(ob.row, ob.col) = ob.value;
  const Matrix pred = spec.designs.X * m * spec.designs.Z;
  const Matrix indicator =
      (pred.cwiseAbs().array() < spec.clip_level).cast<double>().matrix();
  const Matrix closed_form =
      2.0 * spec.lambda / 30.0 *
          (spec.designs.X.transpose() * (y - pred).cwiseProduct(indicator) *
           spec.designs.Z.transpose()) +
      qbmc::grad_log_prior(m, spec.prior);
  CHECK((via_entries - closed_form).norm() <= 1e-10 * closed_form.norm());
}

TEST_CASE("Pythagorean identity on noiseless data is exact") {
  const auto designs = qbmc::gen_designs(7, 4, 3, 6, 90);
  const auto truth = qbmc::gen_coefficient(4, 3, qbmc::ModelVariant::ExactLowRank, 91);
  const Matrix y = designs.X * truth.m_star * designs.Z;

  QuasiPosteriorSpec spec;
  spec.designs = designs;
  spec.obs = qbmc::observations_from_full(y);
  spec.lambda = 3.0;
  spec.prior = qbmc::PriorParams{1.0, 4, 3};
  spec.clip_level = 2.0 * y.cwiseAbs().maxCoeff();

  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_matrix(4, 3, 95 + trial);
    const double lhs = qbmc::empirical_risk(m, spec) - qbmc::empirical_risk(truth.m_star, spec);
    const Matrix clipped = qbmc::clip_project((designs.X * m * designs.Z).eval(),
                                              spec.clip_level);
    const double rhs = qbmc::frobenius_norm_sq((clipped - y).eval()) / 42.0;
    CHECK(lhs == rhs);  // exact: the noise cross-term vanishes identically
  }
}
