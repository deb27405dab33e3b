#include "steerlab/closed_form.hpp"

#include <cmath>

#include "steerlab/error.hpp"
#include "steerlab/kernels.hpp"

namespace steer {

std::string Provenance::describe() const {
  if (source == Source::principal) return "principal(" + std::to_string(principal_index) + ")";
  return "user-op(" + std::string(to_string(op)) + ")";
}

LatentPrior::LatentPrior(double sigma, double mean) : sigma_(sigma) {
  if (mean != 0.0) throw UsageError("only zero-mean latent priors are supported");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("sigma_z must be positive");
}

namespace detail {

void require_matching(const LevelWeights& level, const OperatorSpec& op) {
  if (!(op.dims == level.dims) || level.W.rows() != op.size() || level.b.size() != op.size()) {
    throw DataError("operator dims do not match the level's output tensor");
  }
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& W, const Eigen::VectorXd& w) {
  const auto cols = static_cast<std::size_t>(W.cols());
  Eigen::MatrixXd G(W.cols(), W.cols());
  kernels::active().weighted_gram(W.data(), static_cast<std::size_t>(W.rows()), cols,
                                  static_cast<std::size_t>(W.rows()), w.data(), G.data(), cols);
  G.triangularView<Eigen::StrictlyLower>() = G.transpose();
  return G;
}

PinvSolve solve_symmetric_pinv(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXd& V = eig.eigenvectors();
  const double top = lambda.size() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (top > 0.0 && lambda(i) > kPinvCutoff * top) {
      inv(i) = 1.0 / lambda(i);
      ++rank;
    }
  }
  auto apply_pinv = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return V * inv.cwiseProduct(V.transpose() * r);
  };
  Eigen::VectorXd x = apply_pinv(rhs);
  x += apply_pinv(rhs - G * x);
  return {std::move(x), rank};
}

}  // namespace detail

LinearSolution linear_direction(const LevelWeights& level, const OperatorSpec& op,
                                int level_index) {
  detail::require_matching(level, op);
  const kernels::KernelTable& k = kernels::active();
  const Eigen::VectorXd mask = op.mask();
  const Eigen::VectorXd weight = mask.cwiseProduct(mask);  // D^2
  const Eigen::VectorXd moved = op.apply(level.b) - level.b;  // (P - I) b
  const auto rows = static_cast<std::size_t>(level.W.rows());

  Eigen::VectorXd rhs(level.W.cols());
  for (Eigen::Index j = 0; j < level.W.cols(); ++j) {
    rhs(j) = k.weighted_dot(level.W.col(j).data(), moved.data(), weight.data(), rows);
  }
  const Eigen::MatrixXd G = detail::weighted_gram(level.W, weight);
  detail::PinvSolve solve = detail::solve_symmetric_pinv(G, rhs);

  LinearSolution out;
  out.direction.q = std::move(solve.x);
  out.direction.level = level_index;
  out.direction.provenance = {Provenance::Source::user_operator, op.kind, 0};
  out.rank = solve.rank;
  out.rank_deficient = solve.rank < G.rows();
  if (out.rank_deficient) {
    out.diagnostic = "W^T D^2 W has rank " + std::to_string(solve.rank) + " < " +
                     std::to_string(G.rows()) + "; returned the least-norm minimiser";
  }
  const double rhs_norm = rhs.norm();
  const double res_norm = (G * out.direction.q - rhs).norm();
  out.residual = rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
  return out;
}

ObjectiveTerms objective_value(const LevelWeights& level, const OperatorSpec& op,
                               const Eigen::VectorXd& q,
                               const std::optional<Eigen::VectorXd>& m_diag,
                               const LatentPrior& prior) {
  detail::require_matching(level, op);
  if (q.size() != level.W.cols()) {
    throw DataError("q has length " + std::to_string(q.size()) + ", level expects " +
                    std::to_string(level.W.cols()));
  }
  if (m_diag && m_diag->size() != level.W.cols()) {
    throw DataError("M diagonal has length " + std::to_string(m_diag->size()) +
                    ", level expects " + std::to_string(level.W.cols()));
  }
  const kernels::KernelTable& k = kernels::active();
  const Eigen::VectorXd mask = op.mask();
  const Eigen::VectorXd weight = mask.cwiseProduct(mask);
  const auto rows = static_cast<std::size_t>(level.W.rows());

  const Eigen::MatrixXd PW = op.apply(level.W);
  double frob = 0.0;
  Eigen::VectorXd col(level.W.rows());
  for (Eigen::Index j = 0; j < level.W.cols(); ++j) {
    const double m = m_diag ? (*m_diag)(j) : 1.0;
    col = m * level.W.col(j) - PW.col(j);
    frob += k.weighted_sum_squares(col.data(), weight.data(), rows);
  }
  const Eigen::VectorXd offset = level.W * q + level.b - op.apply(level.b);

  ObjectiveTerms t;
  t.term1 = prior.sigma() * prior.sigma() * frob;
  t.term2 = k.weighted_sum_squares(offset.data(), weight.data(), rows);
  return t;
}

SteeringDirection scale_direction(const SteeringDirection& direction, double alpha) {
  SteeringDirection out = direction;
  out.q = alpha * direction.q;
  out.alpha = alpha;
  return out;
}

}  // namespace steer
