#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "steerlab/closed_form.hpp"
#include "steerlab/error.hpp"
#include "steerlab/oracles.hpp"

using namespace steer;

namespace {

// 1x1x2 grid, W = [1; 2], b = [1; 3], shift-x by +1 with zero fill:
// P = [[0,0],[1,0]], D = diag(0,1).
LevelWeights tiny() {
  LevelWeights lw;
  lw.dims = {1, 1, 2};
  lw.W = (Eigen::MatrixXd(2, 1) << 1, 2).finished();
  lw.b = (Eigen::VectorXd(2) << 1, 3).finished();
  return lw;
}

LevelWeights random_level(std::mt19937_64& rng, Dims dims, int d) {
  LevelWeights lw;
  lw.dims = dims;
  lw.W = testing::gaussian(rng, dims.size(), d);
  lw.b = testing::gaussian(rng, dims.size());
  return lw;
}

}  // namespace

TEST_CASE("frozen: tiny system by hand") {
  const LevelWeights lw = tiny();
  const OperatorSpec op = make_shift(lw.dims, 'x', 1, Boundary::zero_fill);
  const LinearSolution s = linear_direction(lw, op);
  // Only row 2 counts: 2q + (3 - 1) = 0 -> q = -1.
  REQUIRE(s.direction.q.size() == 1);
  CHECK(s.direction.q(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(s.residual <= 1e-15);
  CHECK(s.rank == 1);
  CHECK_FALSE(s.rank_deficient);

  const ObjectiveTerms t = objective_value(lw, op, s.direction.q, std::nullopt, LatentPrior(2.0));
  // term1 = 4 * (W2 - W1)^2 = 4; term2 = 0 at the optimum.
  CHECK(t.term1 == doctest::Approx(4.0));
  CHECK(t.term2 == doctest::Approx(0.0));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(objective_value(lw, op, zero).term2 == doctest::Approx(4.0));  // (3 - 1)^2
  const Eigen::VectorXd m = Eigen::VectorXd::Constant(1, 0.5);
  // D(W M - P W) = row 2: 2 * 0.5 - 1 = 0.
  CHECK(objective_value(lw, op, zero, m).term1 == doctest::Approx(0.0));
}

TEST_CASE("matches the complete-orthogonal-decomposition oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const LevelWeights lw = random_level(rng, {3 + trial % 4, 4, 4}, 4 + trial);
    const OperatorSpec op = trial % 2 ? make_zoom(lw.dims, ZoomDirection::out)
                                      : make_shift(lw.dims, 'y', 1 + trial % 3, Boundary::zero_fill);
    const LinearSolution s = linear_direction(lw, op);
    const Eigen::VectorXd target = (op.materialize() - Eigen::MatrixXd::Identity(op.size(), op.size())) * lw.b;
    const Eigen::VectorXd ref = oracle::masked_least_squares(lw.W, op.mask(), target);
    CHECK((s.direction.q - ref).norm() <= 1e-9 * (1.0 + ref.norm()));
    CHECK(s.residual <= 1e-10);
    CHECK(objective_value(lw, op, s.direction.q).term2 ==
          doctest::Approx(oracle::term2(lw.W, op.materialize(), op.mask(), lw.b, s.direction.q)).epsilon(1e-12));
  }
}

TEST_CASE("rank-deficient W gives the minimum-norm solution") {
  std::mt19937_64 rng(22);
  LevelWeights lw = random_level(rng, {2, 4, 4}, 6);
  lw.W.col(5) = lw.W.col(0);  // duplicate column
  lw.W.col(4) = 2.0 * lw.W.col(1) - lw.W.col(2);
  const OperatorSpec op = make_zoom(lw.dims, ZoomDirection::in);
  const LinearSolution s = linear_direction(lw, op);
  CHECK(s.rank == 4);
  CHECK(s.rank_deficient);
  CHECK_FALSE(s.diagnostic.empty());
  const Eigen::VectorXd target = (op.materialize() - Eigen::MatrixXd::Identity(32, 32)) * lw.b;
  const Eigen::VectorXd ref = oracle::masked_least_squares(lw.W, op.mask(), target);
  CHECK((s.direction.q - ref).norm() <= 1e-9 * ref.norm());
}

TEST_CASE("zero target gives q = 0") {
  std::mt19937_64 rng(23);
  LevelWeights lw = random_level(rng, {2, 2, 2}, 3);
  const LinearSolution s = linear_direction(lw, make_identity(lw.dims));
  CHECK(s.direction.q.isZero(0.0));
}

TEST_CASE("argument checks") {
  const LevelWeights lw = tiny();
  CHECK_THROWS_AS(linear_direction(lw, make_identity({1, 2, 2})), DataError);
  CHECK_THROWS_AS(objective_value(lw, make_identity(lw.dims), Eigen::VectorXd::Zero(2)), DataError);
  CHECK_THROWS_AS(LatentPrior(1.0, 0.5), UsageError);
  CHECK_THROWS_AS(LatentPrior(0.0), UsageError);
  CHECK_THROWS_AS(LatentPrior(-1.0), UsageError);
}

TEST_CASE("scale_direction keeps provenance and records alpha") {
  SteeringDirection d;
  d.q = Eigen::VectorXd::Ones(3);
  d.level = 2;
  d.provenance.op = OperatorKind::zoom_in;
  const SteeringDirection s = scale_direction(d, -2.5);
  CHECK(s.q == Eigen::VectorXd::Constant(3, -2.5));
  CHECK(s.alpha == -2.5);
  CHECK(s.level == 2);
  CHECK(s.provenance.describe() == d.provenance.describe());
}

TEST_CASE("weighted gram and pinv helpers") {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXd W = testing::gaussian(rng, 37, 5);
  const Eigen::VectorXd w = testing::gaussian(rng, 37).cwiseAbs();
  const Eigen::MatrixXd G = detail::weighted_gram(W, w);
  CHECK((G - W.transpose() * w.asDiagonal() * W).norm() <= 1e-12 * G.norm());
  CHECK(G == G.transpose());
  const Eigen::VectorXd rhs = testing::gaussian(rng, 5);
  const auto sol = detail::solve_symmetric_pinv(G, rhs);
  CHECK(sol.rank == 5);
  CHECK((G * sol.x - rhs).norm() <= 1e-12 * rhs.norm() * G.norm());
}
