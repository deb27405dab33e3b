#include "steerlab/walks.hpp"

#include <cmath>
#include <numbers>

#include "steerlab/closed_form.hpp"
#include "steerlab/error.hpp"
#include "steerlab/kernels.hpp"

namespace steer {
namespace {

constexpr double kParallelTol = 1e-10;
constexpr double kUnitTol = 1e-8;
constexpr double kOrthoTol = 1e-10;

void require_chunk(const Eigen::VectorXd& z0, const ActiveChunk& chunk, Eigen::Index width) {
  if (chunk.range.end > static_cast<std::size_t>(z0.size()) || chunk.range.end <= chunk.range.start) {
    throw DataError("chunk [" + std::to_string(chunk.range.start) + "," +
                    std::to_string(chunk.range.end) + ") does not fit a latent of length " +
                    std::to_string(z0.size()));
  }
  if (static_cast<Eigen::Index>(chunk.range.width()) != width) {
    throw DataError("direction has length " + std::to_string(width) + ", chunk width is " +
                    std::to_string(chunk.range.width()));
  }
}

Eigen::VectorXd chunk_of(const Eigen::VectorXd& z, const ActiveChunk& chunk) {
  return z.segment(static_cast<Eigen::Index>(chunk.range.start),
                   static_cast<Eigen::Index>(chunk.range.width()));
}

Eigen::VectorXd with_chunk(const Eigen::VectorXd& z, const ActiveChunk& chunk,
                           const Eigen::VectorXd& values) {
  Eigen::VectorXd out = z;
  out.segment(static_cast<Eigen::Index>(chunk.range.start), values.size()) = values;
  return out;
}

// Validated unit copy of a caller-supplied direction.
Eigen::VectorXd checked_unit(const Eigen::VectorXd& v, const char* name) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol) {
    throw UsageError(std::string(name) + " must be a unit vector (norm " + std::to_string(n) + ")");
  }
  return v / n;
}

}  // namespace

double WalkParams::spectral_norm() const {
  return m_diag.size() > 0 ? m_diag.cwiseAbs().maxCoeff() : 0.0;
}

ActiveChunk active_chunk(const WeightBundle& bundle, int level) {
  bundle.level(level);
  return {level, bundle.chunk(level)};
}

std::string_view to_string(WalkKind kind) {
  switch (kind) {
    case WalkKind::linear: return "linear";
    case WalkKind::neumann: return "neumann";
    case WalkKind::great_circle: return "great-circle";
    case WalkKind::small_circle: return "small-circle";
  }
  return "linear";
}

WalkKind parse_walk_kind(std::string_view name) {
  for (WalkKind k : {WalkKind::linear, WalkKind::neumann, WalkKind::great_circle,
                     WalkKind::small_circle}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown walk kind '" + std::string(name) + "'");
}

Eigen::MatrixXd Trajectory::as_matrix() const {
  if (points.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  return m;
}

WalkParams neumann_params(const LevelWeights& level, const OperatorSpec& op) {
  detail::require_matching(level, op);
  const kernels::KernelTable& k = kernels::active();
  const Eigen::VectorXd mask = op.mask();
  const Eigen::VectorXd weight = mask.cwiseProduct(mask);
  const Eigen::MatrixXd PW = op.apply(level.W);
  const auto rows = static_cast<std::size_t>(level.W.rows());

  WalkParams params;
  params.m_diag.resize(level.W.cols());
  for (Eigen::Index i = 0; i < level.W.cols(); ++i) {
    const double denom = k.weighted_sum_squares(level.W.col(i).data(), weight.data(), rows);
    if (denom == 0.0) {
      throw NumericalError("weight column " + std::to_string(i) +
                           " vanishes under the mask (w_i^T D^2 w_i = 0)");
    }
    params.m_diag(i) = k.weighted_dot(level.W.col(i).data(), PW.col(i).data(), weight.data(), rows) /
                       denom;
  }
  params.q = linear_direction(level, op).direction.q;
  return params;
}

Eigen::VectorXd neumann_step(const Eigen::VectorXd& z_chunk, const WalkParams& params) {
  if (z_chunk.size() != params.m_diag.size() || params.q.size() != params.m_diag.size()) {
    throw DataError("Neumann step: length mismatch");
  }
  return params.m_diag.cwiseProduct(z_chunk) + params.q;
}

WalkParams refine(const WalkParams& params, int n) {
  if (n < 1) throw UsageError("refinement factor must be a positive integer");
  if (params.m_diag.size() != params.q.size()) throw DataError("refine: length mismatch");
  for (Eigen::Index i = 0; i < params.m_diag.size(); ++i) {
    if (!(params.m_diag(i) > 0.0)) {
      throw NumericalError("refinement undefined: M_" + std::to_string(i) + " = " +
                           std::to_string(params.m_diag(i)) + " is not positive");
    }
  }
  WalkParams out = params;
  out.refinement = params.refinement * n;
  if (n == 1) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < params.m_diag.size(); ++i) {
    const double root = std::pow(params.m_diag(i), inv_n);
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k < n; ++k) {
      sum += term;
      term *= root;
    }
    out.m_diag(i) = root;
    out.q(i) = params.q(i) / sum;
  }
  return out;
}

Eigen::VectorXd endpoint(const WalkParams& params) {
  const double rho = params.spectral_norm();
  if (!(rho < 1.0)) {
    throw NumericalError("walk has no endpoint: max |M_ii| = " + std::to_string(rho) + " >= 1");
  }
  return params.q.array() / (1.0 - params.m_diag.array());
}

Trajectory neumann_walk(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const WalkParams& params, int steps) {
  require_chunk(z0, chunk, params.m_diag.size());
  Trajectory t;
  t.kind = WalkKind::neumann;
  t.chunk = chunk;
  Eigen::VectorXd c = chunk_of(z0, chunk);
  for (int n = 0; n < steps; ++n) {
    t.points.push_back(with_chunk(z0, chunk, c));
    t.steps.push_back({n, static_cast<double>(n)});
    c = neumann_step(c, params);
  }
  if (params.spectral_norm() < 1.0) t.endpoint = with_chunk(z0, chunk, endpoint(params));
  return t;
}

Trajectory great_circle(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const Eigen::VectorXd& v_in, double delta, StepRange steps) {
  require_chunk(z0, chunk, v_in.size());
  const Eigen::VectorXd v = checked_unit(v_in, "v");
  const Eigen::VectorXd c = chunk_of(z0, chunk);
  const double r = c.norm();
  const double along = c.dot(v);
  Eigen::VectorXd perp = c - along * v;
  perp -= perp.dot(v) * v;
  const double perp_norm = perp.norm();
  if (!(perp_norm > kParallelTol * r)) {
    throw NumericalError("great circle undefined: z0 chunk is parallel to v");
  }
  const Eigen::VectorXd u = perp / perp_norm;

  Trajectory t;
  t.kind = WalkKind::great_circle;
  t.chunk = chunk;
  t.delta = delta;
  t.theta = std::atan2(along, perp_norm);  // arccos(|P_perp z0| / |z0|) * sign(<z0, v>)
  t.radius = r;
  for (int n = steps.begin; n < steps.end; ++n) {
    const double phase = n * delta + t.theta;
    t.points.push_back(with_chunk(z0, chunk, r * (u * std::cos(phase) + v * std::sin(phase))));
    t.steps.push_back({n, n * delta});
  }
  t.endpoint = with_chunk(z0, chunk, r * v);
  return t;
}

Eigen::VectorXd great_circle_endpoint(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                                      const Eigen::VectorXd& v_in) {
  require_chunk(z0, chunk, v_in.size());
  const Eigen::VectorXd v = checked_unit(v_in, "v");
  return with_chunk(z0, chunk, chunk_of(z0, chunk).norm() * v);
}

Trajectory small_circle(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                        const Eigen::VectorXd& v_in, const Eigen::VectorXd& vref_in, double delta,
                        StepRange steps) {
  require_chunk(z0, chunk, v_in.size());
  require_chunk(z0, chunk, vref_in.size());
  const Eigen::VectorXd v = checked_unit(v_in, "v");
  const Eigen::VectorXd v_ref = checked_unit(vref_in, "v_ref");
  if (std::abs(v.dot(v_ref)) > kOrthoTol) {
    throw UsageError("v and v_ref must be orthogonal (|<v, v_ref>| = " +
                     std::to_string(std::abs(v.dot(v_ref))) + ")");
  }
  const Eigen::VectorXd c = chunk_of(z0, chunk);
  const double a = c.dot(v);
  const double b = c.dot(v_ref);
  const double rho = std::hypot(a, b);
  if (!(rho > kParallelTol * c.norm())) {
    throw NumericalError("small circle undefined: z0 has no component in span{v, v_ref}");
  }
  const Eigen::VectorXd base = c - a * v - b * v_ref;

  Trajectory t;
  t.kind = WalkKind::small_circle;
  t.chunk = chunk;
  t.delta = delta;
  t.theta = std::atan2(a, b);  // arccos(<z0, v_ref> / |P_V z0|) * sign(<z0, v>)
  t.radius = rho;
  for (int n = steps.begin; n < steps.end; ++n) {
    const double phase = n * delta + t.theta;
    t.points.push_back(
        with_chunk(z0, chunk, base + rho * (v_ref * std::cos(phase) + v * std::sin(phase))));
    t.steps.push_back({n, n * delta});
  }
  t.endpoint = with_chunk(z0, chunk, base + rho * v);
  return t;
}

AngularSteps match_step_sizes(double delta_linear, const Eigen::VectorXd& z0,
                              const ActiveChunk& chunk, const Eigen::VectorXd& v_in,
                              const std::optional<Eigen::VectorXd>& v_ref) {
  require_chunk(z0, chunk, v_in.size());
  const Eigen::VectorXd c = chunk_of(z0, chunk);
  const double r = c.norm();
  if (!(r > 0.0)) throw NumericalError("step matching: z0 chunk has zero norm");
  AngularSteps out;
  out.great = delta_linear / r;
  if (v_ref) {
    require_chunk(z0, chunk, v_ref->size());
    const double rho = std::hypot(c.dot(v_in), c.dot(*v_ref));
    if (!(rho > 0.0)) throw NumericalError("step matching: P_V z0 has zero norm");
    out.small = delta_linear / rho;
  }
  return out;
}

Trajectory linear_walk(const Eigen::VectorXd& z0, const ActiveChunk& chunk,
                       const Eigen::VectorXd& q, double alpha, StepRange steps) {
  require_chunk(z0, chunk, q.size());
  const Eigen::VectorXd c = chunk_of(z0, chunk);
  Trajectory t;
  t.kind = WalkKind::linear;
  t.chunk = chunk;
  t.delta = alpha * q.norm();
  for (int n = steps.begin; n < steps.end; ++n) {
    t.points.push_back(with_chunk(z0, chunk, c + (n * alpha) * q));
    t.steps.push_back({n, n * alpha});
  }
  return t;
}

Eigen::VectorXd unit(const Eigen::VectorXd& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalise a zero direction");
  return q / n;
}

}  // namespace steer
