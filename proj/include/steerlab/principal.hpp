#pragma once

#include <vector>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"

namespace steer {

/// Right singular vectors of a level's W, strongest first. Each column's
/// largest-magnitude entry is positive (first such entry on ties).
struct PrincipalBasis {
  Eigen::MatrixXd V;       // d_level x r
  Eigen::VectorXd sigmas;  // nonincreasing
  int level = 1;
  // Directions whose singular value is numerically zero (beyond the rank of W).
  std::vector<bool> null_direction;

  Eigen::Index count() const { return V.cols(); }
};

/// Relative threshold below which a singular value is reported as null.
inline constexpr double kNullSigmaTol = 1e-12;

/// Thin SVD right factor of W. When W has more columns than rows the
/// remaining null-space directions are appended with sigma = 0 and flagged.
PrincipalBasis principal_directions(const LevelWeights& level, int level_index = 1);

/// v_r, the direction with the smallest singular value.
Eigen::VectorXd least_dominant(const PrincipalBasis& basis);

/// Entry (i, j) = |<a_i, b_j>| / (||a_i|| ||b_j||) over the columns of A and B.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Flip column signs so each column's largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& V);

}  // namespace steer
