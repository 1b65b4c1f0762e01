#include "qbmc/csv.hpp"
#include "qbmc/datagen.hpp"
#include "qbmc/linalg.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using qbmc::Matrix;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("gen_designs is deterministic in the seed") {
  const auto a = qbmc::gen_designs(2, 2, 2, 2, 7);
  const auto b = qbmc::gen_designs(2, 2, 2, 2, 7);
  CHECK(a.X == b.X);
  CHECK(a.Z == b.Z);
  const auto c = qbmc::gen_designs(2, 2, 2, 2, 8);
  CHECK(a.X != c.X);
  CHECK_THROWS_AS(qbmc::gen_designs(0, 2, 2, 2, 7), std::invalid_argument);
}

TEST_CASE("gen_designs entries look standard normal") {
  const auto d = qbmc::gen_designs(1000, 100, 2, 2, 123);
  const double n_draws = 1000.0 * 100.0;
  const double mean = d.X.sum() / n_draws;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(n_draws));
  const double var = (d.X.array() - mean).square().sum() / (n_draws - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gen_coefficient rank structure") {
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const auto exact = qbmc::gen_coefficient(10, 8, qbmc::ModelVariant::ExactLowRank, seed);
    const auto svd = qbmc::truncated_svd(exact.m_star, 8);
    CHECK(svd.s(2) < 1e-10 * svd.s(0));
    CHECK(svd.s(1) > 1e-10 * svd.s(0));

    const auto approx =
        qbmc::gen_coefficient(10, 8, qbmc::ModelVariant::ApproxLowRank, seed);
    const auto svd2 = qbmc::truncated_svd(approx.m_star, 8);
    CHECK(svd2.s(2) > 1e-10 * svd2.s(0));   // perturbed: genuinely full rank
    CHECK(svd2.s(2) < 0.5 * svd2.s(1));     // but still dominated by the rank-2 part
  }
  const auto a = qbmc::gen_coefficient(5, 4, qbmc::ModelVariant::ExactLowRank, 11);
  const auto b = qbmc::gen_coefficient(5, 4, qbmc::ModelVariant::ExactLowRank, 11);
  CHECK(a.m_star == b.m_star);
}

TEST_CASE("gen_response") {
  const auto designs = qbmc::gen_designs(6, 4, 3, 5, 5);
  const auto truth = qbmc::gen_coefficient(4, 3, qbmc::ModelVariant::ExactLowRank, 6);
  const Matrix clean = qbmc::gen_response(designs, truth, 0.0, 1);
  CHECK((clean - designs.X * truth.m_star * designs.Z).norm() <= 1e-12);

  qbmc::DesignPair unit{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 3.0)};
  qbmc::GroundTruth m2{Matrix::Constant(1, 1, 2.0), 1, qbmc::ModelVariant::ExactLowRank};
  CHECK(qbmc::gen_response(unit, m2, 0.0, 1)(0, 0) == doctest::Approx(6.0));

  // Noise variance over many entries.
  const auto big = qbmc::gen_designs(500, 4, 3, 200, 7);
  const Matrix signal = big.X * truth.m_star * big.Z;
  const Matrix noisy = qbmc::gen_response(big, truth, 2.0, 9);
  const Matrix residual = noisy - signal;
  const double var = residual.squaredNorm() / (residual.size() - 1);
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sample_observations masked subset") {
  const auto designs = qbmc::gen_designs(10, 4, 3, 10, 5);
  const auto truth = qbmc::gen_coefficient(4, 3, qbmc::ModelVariant::ExactLowRank, 6);
  const Matrix y = qbmc::gen_response(designs, truth, 1.0, 2);

  const auto all = qbmc::sample_observations(y, qbmc::ObservationMode::MaskedWithoutReplacement,
                                             0.0, 3);
  CHECK(all.entries.size() == 100);

  const auto kept = qbmc::sample_observations(y, qbmc::ObservationMode::MaskedWithoutReplacement,
                                              0.3, 3);
  CHECK(kept.entries.size() == 70);
  std::set<std::pair<int, int>> cells;
  for (const auto& ob : kept.entries) {
    CHECK(ob.row >= 0);
    CHECK(ob.row < 10);
    CHECK(ob.col >= 0);
    CHECK(ob.col < 10);
    CHECK(ob.value == y(ob.row, ob.col));
    cells.emplace(ob.row, ob.col);
  }
  CHECK(cells.size() == kept.entries.size());  // no repeats

  // Deterministic count for a few rates.
  for (double kappa : {0.13, 0.5, 0.99}) {
    const auto s = qbmc::sample_observations(y, qbmc::ObservationMode::MaskedWithoutReplacement,
                                             kappa, 17);
    CHECK(static_cast<double>(s.entries.size()) == std::ceil((1.0 - kappa) * 100));
  }
  CHECK_THROWS_AS(qbmc::sample_observations(y, qbmc::ObservationMode::MaskedWithoutReplacement,
                                            1.0, 3),
                  std::invalid_argument);
}

TEST_CASE("sample_observations iid draws are uniform over cells") {
  const Matrix y = Matrix::Random(10, 10);
  const int m = 100000;
  const auto obs =
      qbmc::sample_observations(y, qbmc::ObservationMode::IidWithReplacement, m, 77);
  CHECK(obs.entries.size() == static_cast<std::size_t>(m));
  Matrix counts = Matrix::Zero(10, 10);
  for (const auto& ob : obs.entries) counts(ob.row, ob.col) += 1;
  const double expected = m / 100.0;
  double chi2 = 0;
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < 10; ++i) {
      const double d = counts(i, j) - expected;
      chi2 += d * d / expected;
    }
  CHECK(chi2 < 134.642);  // chi-square 99 dof, upper 1% point

  CHECK_THROWS_AS(qbmc::sample_observations(y, qbmc::ObservationMode::IidWithReplacement, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("matrix csv round trip is exact") {
  const auto designs = qbmc::gen_designs(7, 5, 2, 2, 31);
  const std::string path = temp_path("qbmc_mat.csv");
  qbmc::write_matrix_csv(path, designs.X);
  const Matrix back = qbmc::read_matrix_csv(path);
  CHECK(back == designs.X);  // bit exact through 17 significant digits
  std::filesystem::remove(path);
}

TEST_CASE("observation csv round trip preserves entries and order") {
  const Matrix y = Matrix::Random(6, 5);
  const auto obs = qbmc::sample_observations(y, qbmc::ObservationMode::MaskedWithoutReplacement,
                                             0.4, 9);
  const std::string path = temp_path("qbmc_obs.csv");
  qbmc::write_observations_csv(path, obs);
  const auto back = qbmc::read_observations_csv(path, 6, 5);
  REQUIRE(back.entries.size() == obs.entries.size());
  for (std::size_t i = 0; i < obs.entries.size(); ++i) {
    CHECK(back.entries[i].row == obs.entries[i].row);
    CHECK(back.entries[i].col == obs.entries[i].col);
    CHECK(back.entries[i].value == obs.entries[i].value);
  }
  CHECK(back.mode == qbmc::ObservationMode::MaskedWithoutReplacement);

  const auto full = qbmc::observations_from_full(y);
  qbmc::write_observations_csv(path, full);
  CHECK(qbmc::read_observations_csv(path, 6, 5).mode == qbmc::ObservationMode::Full);
  std::filesystem::remove(path);
}

TEST_CASE("csv errors name the file and line") {
  const std::string path = temp_path("qbmc_bad.csv");
  {
    std::ofstream out(path);
    out << "1,2\n3,oops\n";
  }
  try {
    qbmc::read_matrix_csv(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(path) != std::string::npos);
    CHECK(msg.find(":2") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << "row,col,value\n0,0,1.5\n9,0,2.5\n";
  }
  try {
    qbmc::read_observations_csv(path, 3, 3);
    FAIL("expected an index error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  std::filesystem::remove(path);
}
