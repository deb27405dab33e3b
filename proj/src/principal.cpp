#include "steerlab/principal.hpp"

#include <Eigen/SVD>

#include "steerlab/error.hpp"

namespace steer {

void canonicalize_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (V(arg, j) < 0.0) V.col(j) = -V.col(j);
  }
}

PrincipalBasis principal_directions(const LevelWeights& level, int level_index) {
  const Eigen::MatrixXd& W = level.W;
  if (W.size() == 0) throw DataError("principal directions: W is empty");
  if (!W.allFinite()) throw DataError("principal directions: W has non-finite entries");

  const bool wide = W.cols() > W.rows();
  const unsigned options = wide ? Eigen::ComputeFullV : Eigen::ComputeThinV;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(W, options);

  PrincipalBasis basis;
  basis.level = level_index;
  basis.V = svd.matrixV();
  basis.sigmas = Eigen::VectorXd::Zero(basis.V.cols());
  basis.sigmas.head(svd.singularValues().size()) = svd.singularValues();
  canonicalize_signs(basis.V);

  const double top = basis.sigmas(0);
  basis.null_direction.resize(static_cast<std::size_t>(basis.sigmas.size()));
  for (Eigen::Index k = 0; k < basis.sigmas.size(); ++k) {
    basis.null_direction[static_cast<std::size_t>(k)] =
        !(top > 0.0) || basis.sigmas(k) <= kNullSigmaTol * top;
  }
  return basis;
}

Eigen::VectorXd least_dominant(const PrincipalBasis& basis) {
  if (basis.V.cols() < 2) {
    throw UsageError("least dominant direction needs at least two principal directions");
  }
  return basis.V.col(basis.V.cols() - 1);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows()) {
    throw DataError("correlation matrix: bases have " + std::to_string(A.rows()) + " and " +
                    std::to_string(B.rows()) + " rows");
  }
  const Eigen::VectorXd na = A.colwise().norm().transpose();
  const Eigen::VectorXd nb = B.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < na.size(); ++i) {
    if (!(na(i) > 0.0)) throw DataError("correlation matrix: column " + std::to_string(i) + " of A has zero norm");
  }
  for (Eigen::Index j = 0; j < nb.size(); ++j) {
    if (!(nb(j) > 0.0)) throw DataError("correlation matrix: column " + std::to_string(j) + " of B has zero norm");
  }
  Eigen::MatrixXd C = (A.transpose() * B).cwiseAbs();
  C.array().colwise() /= na.array();
  C.array().rowwise() /= nb.transpose().array();
  return C;
}

}  // namespace steer
