#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"
#include "steerlab/operators.hpp"

namespace steer {

struct Provenance {
  enum class Source { user_operator, principal };
  Source source = Source::user_operator;
  OperatorKind op = OperatorKind::identity;  // user_operator
  int principal_index = 0;                   // principal, 1-based

  std::string describe() const;
};

/// Latent-space direction for one level: adding alpha * q to the level's
/// chunk applies the associated transformation.
struct SteeringDirection {
  Eigen::VectorXd q;
  int level = 1;
  Provenance provenance;
  double alpha = 1.0;
};

/// Isotropic latent prior, z ~ (0, sigma^2 I). Only zero-mean priors are
/// supported; the constructor rejects anything else.
class LatentPrior {
 public:
  explicit LatentPrior(double sigma = 1.0, double mean = 0.0);
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

struct LinearSolution {
  SteeringDirection direction;
  double residual = 0.0;  // ||W^T D^2 (W q + (I-P) b)|| / ||W^T D^2 (I-P) b||
  int rank = 0;           // numerical rank of W^T D^2 W
  bool rank_deficient = false;
  std::string diagnostic;  // set when the pseudo-inverse path was taken
};

/// Relative eigenvalue cutoff for the pseudo-inverse of W^T D^2 W.
inline constexpr double kPinvCutoff = 1e-12;

/// Least-squares direction q = (W^T D^2 W)^+ W^T D^2 (P - I) b.
LinearSolution linear_direction(const LevelWeights& level, const OperatorSpec& op,
                                int level_index = 1);

struct ObjectiveTerms {
  double term1 = 0.0;  // sigma^2 ||D (W M - P W)||_F^2, M = I when absent
  double term2 = 0.0;  // ||D (W q + (I - P) b)||^2
  double total() const { return term1 + term2; }
};

/// Expected masked transformation error E||D(W(Mz + q) + b - P(Wz + b))||^2,
/// split into the q-independent and q-dependent parts.
ObjectiveTerms objective_value(const LevelWeights& level, const OperatorSpec& op,
                               const Eigen::VectorXd& q,
                               const std::optional<Eigen::VectorXd>& m_diag = std::nullopt,
                               const LatentPrior& prior = LatentPrior{});

SteeringDirection scale_direction(const SteeringDirection& direction, double alpha);

namespace detail {

void require_matching(const LevelWeights& level, const OperatorSpec& op);

/// Full symmetric W^T diag(w) W through the active kernel table.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& W, const Eigen::VectorXd& w);

struct PinvSolve {
  Eigen::VectorXd x;
  int rank = 0;
};

/// Minimum-norm solution of G x = rhs for symmetric PSD G, eigenvalues below
/// kPinvCutoff * max eigenvalue treated as zero; one refinement sweep.
PinvSolve solve_symmetric_pinv(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs);

}  // namespace detail

}  // namespace steer
