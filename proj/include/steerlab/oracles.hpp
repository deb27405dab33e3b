#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

// Reference computations that deliberately avoid the production code paths
// (no kernel table, no implicit Kronecker operators, no pseudo-inverse via
// the normal equations). Used by the unit tests and the acceptance suite.
namespace steer::oracle {

/// Minimum-norm minimiser of ||diag(mask) (W q - target)|| through a complete
/// orthogonal decomposition of diag(mask) W.
Eigen::VectorXd masked_least_squares(const Eigen::MatrixXd& W, const Eigen::VectorXd& mask,
                                     const Eigen::VectorXd& target);

/// ||D (W q + (I - P) b)||^2 with dense P, by plain loops.
double term2(const Eigen::MatrixXd& W, const Eigen::MatrixXd& P, const Eigen::VectorXd& mask,
             const Eigen::VectorXd& b, const Eigen::VectorXd& q);

/// Golden-section minimiser of a unimodal f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-13, int max_iter = 400);

/// argmin over m of ||D (w_i m - (P W)_i)||^2 by golden-section search.
double diagonal_entry(const Eigen::MatrixXd& W, const Eigen::MatrixXd& P,
                      const Eigen::VectorXd& mask, Eigen::Index i);

struct MonteCarlo {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of ||D (W (M z + q) + b - P (W z + b))||^2 over z ~ N(0, sigma^2 I).
MonteCarlo objective_expectation(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& P, const Eigen::VectorXd& mask,
                                 const Eigen::VectorXd& m_diag, const Eigen::VectorXd& q,
                                 double sigma, int samples, std::uint64_t seed);

/// Eigenvalues of W^T W, descending, from a Gram matrix built with plain loops.
Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& W);

}  // namespace steer::oracle
