#include "steerlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/QR>

namespace steer::oracle {

Eigen::VectorXd masked_least_squares(const Eigen::MatrixXd& W, const Eigen::VectorXd& mask,
                                     const Eigen::VectorXd& target) {
  const Eigen::MatrixXd DW = mask.asDiagonal() * W;
  const Eigen::VectorXd Dt = mask.cwiseProduct(target);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(DW);
  cod.setThreshold(1e-12);
  return cod.solve(Dt);
}

double term2(const Eigen::MatrixXd& W, const Eigen::MatrixXd& P, const Eigen::VectorXd& mask,
             const Eigen::VectorXd& b, const Eigen::VectorXd& q) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    double r = b(i);
    for (Eigen::Index j = 0; j < W.cols(); ++j) r += W(i, j) * q(j);
    for (Eigen::Index j = 0; j < P.cols(); ++j) r -= P(i, j) * b(j);
    r *= mask(i);
    total += r * r;
  }
  return total;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double diagonal_entry(const Eigen::MatrixXd& W, const Eigen::MatrixXd& P,
                      const Eigen::VectorXd& mask, Eigen::Index i) {
  const Eigen::VectorXd w = W.col(i);
  Eigen::VectorXd pw = Eigen::VectorXd::Zero(W.rows());
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    for (Eigen::Index c = 0; c < P.cols(); ++c) pw(r) += P(r, c) * w(c);
  }
  auto f = [&](double m) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < w.size(); ++r) {
      const double e = mask(r) * (w(r) * m - pw(r));
      s += e * e;
    }
    return s;
  };
  // The minimiser lies within |m| <= ||D P w|| / ||D w||.
  double wn = 0.0;
  double pn = 0.0;
  for (Eigen::Index r = 0; r < w.size(); ++r) {
    wn += mask(r) * mask(r) * w(r) * w(r);
    pn += mask(r) * mask(r) * pw(r) * pw(r);
  }
  const double bound = std::sqrt(pn / wn) * 1.5 + 1.0;
  return golden_section(f, -bound, bound);
}

MonteCarlo objective_expectation(const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& P, const Eigen::VectorXd& mask,
                                 const Eigen::VectorXd& m_diag, const Eigen::VectorXd& q,
                                 double sigma, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  const Eigen::Index d = W.cols();
  Eigen::VectorXd z(d);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
    const Eigen::VectorXd moved = W * (m_diag.cwiseProduct(z) + q) + b;
    const Eigen::VectorXd target = P * (W * z + b);
    const double v = mask.cwiseProduct(moved - target).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  const double n = samples;
  MonteCarlo mc;
  mc.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mc.mean * mc.mean) / (n - 1.0));
  mc.standard_error = std::sqrt(var / n);
  return mc;
}

Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& W) {
  const Eigen::Index d = W.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < W.rows(); ++r) s += W(r, i) * W(r, j);
      G(i, j) = s;
      G(j, i) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = eig.eigenvalues().reverse();
  return ev;
}

}  // namespace steer::oracle
