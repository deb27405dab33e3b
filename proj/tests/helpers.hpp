#pragma once

#include <random>

#include <Eigen/Dense>

namespace testing {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return n(rng); });
}

inline Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index n) {
  return gaussian(rng, n, 1).col(0);
}

}  // namespace testing
