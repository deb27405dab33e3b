#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "steerlab/error.hpp"
#include "steerlab/oracles.hpp"
#include "steerlab/principal.hpp"

using namespace steer;

namespace {

LevelWeights level_of(const Eigen::MatrixXd& W) {
  LevelWeights lw;
  lw.W = W;
  lw.dims = {static_cast<int>(W.rows()), 1, 1};
  return lw;
}

}  // namespace

TEST_CASE("frozen: diagonal W") {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(3, 2);
  W(0, 1) = -3.0;
  W(1, 0) = 1.0;
  const PrincipalBasis b = principal_directions(level_of(W), 4);
  CHECK(b.level == 4);
  CHECK(b.sigmas(0) == doctest::Approx(3.0));
  CHECK(b.sigmas(1) == doctest::Approx(1.0));
  CHECK(b.V.col(0).isApprox(Eigen::Vector2d(0, 1)));  // sign convention: positive
  CHECK(b.V.col(1).isApprox(Eigen::Vector2d(1, 0)));
  CHECK(least_dominant(b).isApprox(Eigen::Vector2d(1, 0)));
}

TEST_CASE("basis invariants on random tall matrices") {
  std::mt19937_64 rng(41);
  for (auto [r, c] : {std::pair{50, 7}, {200, 20}, {20, 20}}) {
    const Eigen::MatrixXd W = testing::gaussian(rng, r, c);
    const PrincipalBasis b = principal_directions(level_of(W));
    REQUIRE(b.count() == c);
    CHECK((b.V.transpose() * b.V - Eigen::MatrixXd::Identity(c, c)).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::VectorXd eig = oracle::gram_eigenvalues(W);
    for (int k = 0; k < c; ++k) {
      if (k > 0) CHECK(b.sigmas(k) <= b.sigmas(k - 1));
      CHECK((W * b.V.col(k)).norm() == doctest::Approx(b.sigmas(k)).epsilon(1e-12));
      CHECK(b.sigmas(k) * b.sigmas(k) == doctest::Approx(eig(k)).epsilon(1e-10));
      Eigen::Index arg;
      b.V.col(k).cwiseAbs().maxCoeff(&arg);
      CHECK(b.V(arg, k) > 0.0);
      CHECK_FALSE(b.null_direction[static_cast<std::size_t>(k)]);
    }
  }
}

TEST_CASE("wide W: full basis with null directions flagged") {
  std::mt19937_64 rng(42);
  const Eigen::MatrixXd W = testing::gaussian(rng, 3, 6);
  const PrincipalBasis b = principal_directions(level_of(W));
  REQUIRE(b.count() == 6);
  CHECK((b.V.transpose() * b.V - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
  for (int k = 0; k < 6; ++k) CHECK(b.null_direction[static_cast<std::size_t>(k)] == (k >= 3));
  CHECK(b.sigmas.tail(3).isZero(0.0));
  CHECK((W * b.V.rightCols(3)).norm() <= 1e-12);
}

TEST_CASE("rank-deficient W marks the null direction") {
  std::mt19937_64 rng(43);
  Eigen::MatrixXd W = testing::gaussian(rng, 10, 3);
  W.col(2) = W.col(0) + W.col(1);
  const PrincipalBasis b = principal_directions(level_of(W));
  CHECK(b.null_direction == std::vector<bool>{false, false, true});
}

TEST_CASE("correlation matrix") {
  std::mt19937_64 rng(44);
  const PrincipalBasis b = principal_directions(level_of(testing::gaussian(rng, 30, 5)));
  const Eigen::MatrixXd C = correlation_matrix(b.V, b.V);
  CHECK((C - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd A = (Eigen::MatrixXd(2, 2) << 1, 1, 0, 1).finished();
  const Eigen::MatrixXd B = (Eigen::MatrixXd(2, 1) << -2, 0).finished();
  const Eigen::MatrixXd D = correlation_matrix(A, B);
  CHECK(D(0, 0) == doctest::Approx(1.0));
  CHECK(D(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(correlation_matrix(A, Eigen::MatrixXd::Zero(2, 1)), DataError);
  CHECK_THROWS_AS(correlation_matrix(A, Eigen::MatrixXd::Ones(3, 1)), DataError);
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(principal_directions(level_of(Eigen::MatrixXd(0, 0))), DataError);
  Eigen::MatrixXd W = Eigen::MatrixXd::Ones(2, 2);
  W(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(principal_directions(level_of(W)), DataError);
  CHECK_THROWS_AS(least_dominant(principal_directions(level_of(Eigen::MatrixXd::Ones(3, 1)))), UsageError);
}
