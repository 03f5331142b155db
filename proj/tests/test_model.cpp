#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sbmest/model.hpp"

using namespace sbmest;

TEST_CASE("validate_model accepts the scalar case") {
  Eigen::MatrixXd B(1, 1);
  B << 0.5;
  Eigen::VectorXd pi(1);
  pi << 1.0;
  const ModelSpec m = validate_model(B, pi, 1.0);
  CHECK(m.K == 1);
  CHECK(m.d == 1);
}

TEST_CASE("validate_model detects rank of the rank-1 two-block family") {
  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  CHECK(m.K == 2);
  CHECK(m.d == 1);
}

TEST_CASE("validate_model rejects bad inputs") {
  Eigen::MatrixXd B(2, 2);
  B << 0.5, 0.2, 0.2, -0.1;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  CHECK_THROWS_AS(validate_model(B, pi, 1.0), OutOfRangeError);

  Eigen::MatrixXd asym(2, 2);
  asym << 0.5, 0.2, 0.3, 0.1;
  CHECK_THROWS_AS(validate_model(asym, pi, 1.0), NonSymmetricError);

  Eigen::MatrixXd ok(2, 2);
  ok << 0.5, 0.2, 0.2, 0.1;
  Eigen::VectorXd bad_pi(2);
  bad_pi << 0.7, 0.7;
  CHECK_THROWS_AS(validate_model(ok, bad_pi, 1.0), BadSimplexError);
  Eigen::VectorXd zero_pi(2);
  zero_pi << 1.0, 0.0;
  CHECK_THROWS_AS(validate_model(ok, zero_pi, 1.0), BadSimplexError);
  CHECK_THROWS_AS(validate_model(ok, pi, 1.5), OutOfRangeError);
}

TEST_CASE("latent_positions on the scalar model") {
  Eigen::MatrixXd B(1, 1);
  B << 0.25;
  Eigen::VectorXd pi(1);
  pi << 1.0;
  const LatentPositions lp = latent_positions(validate_model(B, pi, 1.0));
  CHECK(lp.nu(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lp.p_sig == 1);
  CHECK(lp.q_sig == 0);
}

TEST_CASE("latent_positions reconstructs the rank-1 two-block model") {
  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  const LatentPositions lp = latent_positions(m);
  CHECK(lp.dim() == 1);
  CHECK(lp.p_sig == 1);
  CHECK(std::abs(lp.nu(0, 0)) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(std::abs(lp.nu(1, 0)) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK((lp.reconstruct() - m.B).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("latent_positions reports an indefinite signature") {
  Eigen::MatrixXd B(2, 2);
  B << 0.0, 0.5, 0.5, 0.0;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  const LatentPositions lp = latent_positions(validate_model(B, pi, 1.0));
  CHECK(lp.p_sig == 1);
  CHECK(lp.q_sig == 1);
  CHECK(lp.eigvals[0] == doctest::Approx(0.5));   // positive first on the tie
  CHECK(lp.eigvals[1] == doctest::Approx(-0.5));
  CHECK((lp.reconstruct() - B).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ambiguous rank cutoff is flagged") {
  Eigen::MatrixXd B(2, 2);
  B << 0.5, 0.0, 0.0, 1.2e-10;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  const ModelSpec m = validate_model(B, pi, 1.0);
  CHECK_THROWS_AS(latent_positions(m), RankDeficiencyAmbiguousError);
}

TEST_CASE("round trip nu I nu^T = B over random models") {
  std::mt19937_64 gen(321);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int K = 1 + static_cast<int>(gen() % 4);
    const Eigen::MatrixXd B = oracles::random_symmetric(K, 0.05, 0.95, gen);
    const Eigen::VectorXd pi = oracles::random_simplex(K, gen);
    ModelSpec m;
    try {
      m = validate_model(B, pi, 1.0);
    } catch (const Error&) {
      continue;
    }
    const LatentPositions lp = latent_positions(m);
    CHECK(lp.p_sig + lp.q_sig == m.d);
    CHECK((lp.reconstruct() - m.B).cwiseAbs().maxCoeff() < 1e-10);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("rank-2 three-block family has rank 2") {
  const Eigen::Vector3d pi(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const ModelSpec m = rank2_3block_model(0.5, 0.5, 0.7, 0.8, 0.5, pi);
  CHECK(m.d == 2);
  const LatentPositions lp = latent_positions(m);
  CHECK((lp.reconstruct() - m.B).cwiseAbs().maxCoeff() < 1e-10);
}
