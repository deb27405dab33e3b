#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"
#include "steerlab/operators.hpp"

namespace steer {

/// Parameters of the affine walk z_{n+1} = M z_n + q with diagonal M.
struct WalkParams {
  Eigen::VectorXd m_diag;
  Eigen::VectorXd q;
  double sigma_z = 1.0;
  int refinement = 1;  // how many times finer than the solved walk

  /// max |M_ii|, the spectral norm of the diagonal M.
  double spectral_norm() const;
};

/// The slice of the full latent vector a walk is allowed to move.
struct ActiveChunk {
  int level = 1;
  ChunkRange range;
};

ActiveChunk active_chunk(const WeightBundle& bundle, int level);

/// Half-open range of step indices [begin, end). Negative indices walk backwards.
struct StepRange {
  int begin = 0;
  int end = 0;

  static StepRange first(int count) { return {0, count}; }
  int count() const { return end > begin ? end - begin : 0; }
};

enum class WalkKind { linear, neumann, great_circle, small_circle };
std::string_view to_string(WalkKind kind);
WalkKind parse_walk_kind(std::string_view name);

struct StepInfo {
  int index = 0;
  double cumulative = 0.0;  // n*delta (radians) on circles, n*alpha for linear, n for Neumann
};

struct Trajectory {
  WalkKind kind = WalkKind::linear;
  ActiveChunk chunk;
  std::vector<Eigen::VectorXd> points;  // full latent vectors
  std::vector<StepInfo> steps;
  double delta = 0.0;
  double theta = 0.0;   // circles: phase of z0
  double radius = 0.0;  // circles: ||z0 chunk|| or ||P_V z0 chunk||
  std::optional<Eigen::VectorXd> endpoint;

  /// points as rows of a (steps x latent_dim) matrix.
  Eigen::MatrixXd as_matrix() const;
};

// --- Neumann walks -------------------------------------------------------

/// M_ii = (w_i^T D^2 P w_i) / (w_i^T D^2 w_i), q from linear_direction.
WalkParams neumann_params(const LevelWeights& level, const OperatorSpec& op);

Eigen::VectorXd neumann_step(const Eigen::VectorXd& z_chunk, const WalkParams& params);

/// Parameters of an N-times finer walk: N refined steps equal one original step.
/// Requires every M_ii > 0.
WalkParams refine(const WalkParams& params, int n);

/// Fixed point (I - M)^{-1} q; requires max |M_ii| < 1.
Eigen::VectorXd endpoint(const WalkParams& params);

Trajectory neumann_walk(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const WalkParams& params, int steps);

// --- Spherical walks -----------------------------------------------------

/// Great circle through z0 and ||z0|| v on the level's chunk:
///   chunk_n = ||z0|| (u cos(n delta + theta) + v sin(n delta + theta)).
Trajectory great_circle(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const Eigen::VectorXd& v, double delta, StepRange steps);

Eigen::VectorXd great_circle_endpoint(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                                      const Eigen::VectorXd& v);

/// Small circle moving only the projections onto v and v_ref:
///   chunk_n = P_{V-perp} z0 + ||P_V z0|| (v_ref cos(n delta + theta) + v sin(n delta + theta)).
Trajectory small_circle(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const Eigen::VectorXd& v, const Eigen::VectorXd& v_ref, double delta,
                        StepRange steps);

struct AngularSteps {
  double great = 0.0;
  std::optional<double> small;
};

/// Angular steps whose arc length equals a linear step of length delta_linear.
AngularSteps match_step_sizes(double delta_linear, const Eigen::VectorXd& z0,
                              const ActiveChunk& chunk, const Eigen::VectorXd& v,
                              const std::optional<Eigen::VectorXd>& v_ref = std::nullopt);

/// chunk_n = chunk_0 + n * alpha * q.
Trajectory linear_walk(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                       const Eigen::VectorXd& q, double alpha, StepRange steps);

/// q / ||q||; throws on a zero vector.
Eigen::VectorXd unit(const Eigen::VectorXd& q);

}  // namespace steer
