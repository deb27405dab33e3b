#include "steerlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steerlab/closed_form.hpp"
#include "steerlab/operators.hpp"
#include "steerlab/oracles.hpp"
#include "steerlab/principal.hpp"
#include "steerlab/toygen.hpp"
#include "steerlab/transfer.hpp"
#include "steerlab/walks.hpp"

namespace steer::acceptance {
namespace {

using Rng = std::mt19937_64;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
  return Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::VectorXd random_unit(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v = random_vector(rng, n);
  return v / v.norm();
}

struct System {
  LevelWeights level;
  OperatorSpec op;
};

// Random first layer with 16-256 rows, 4-32 columns and a random operator;
// the custom case draws a sparse spatial matrix with about a quarter zero rows.
System random_system(Rng& rng) {
  for (;;) {
    const int kind = uniform_int(rng, 0, 5);
    const int h = 2 * uniform_int(rng, 1, 4);
    const int w = kind == 4 ? h : 2 * uniform_int(rng, 1, 4);
    const int plane = h * w;
    const int c_lo = (16 + plane - 1) / plane;
    const int c_hi = 256 / plane;
    if (c_lo > c_hi) continue;
    const Dims dims{uniform_int(rng, c_lo, c_hi), h, w};

    System s;
    switch (kind) {
      case 0: s.op = make_shift(dims, 'x', uniform_int(rng, -(w - 1), w - 1), Boundary::zero_fill); break;
      case 1: s.op = make_shift(dims, 'y', uniform_int(rng, -(h - 1), h - 1), Boundary::zero_fill); break;
      case 2: s.op = make_zoom(dims, ZoomDirection::in); break;
      case 3: s.op = make_zoom(dims, ZoomDirection::out); break;
      case 4: s.op = make_rot90(dims, uniform_int(rng, 0, 3)); break;
      default: {
        Eigen::MatrixXd sp = Eigen::MatrixXd::Zero(plane, plane);
        for (int r = 0; r < plane; ++r) {
          if (uniform(rng, 0.0, 1.0) < 0.25) continue;
          const int nnz = uniform_int(rng, 1, 2);
          for (int k = 0; k < nnz; ++k) sp(r, uniform_int(rng, 0, plane - 1)) = uniform(rng, 0.2, 1.0);
        }
        s.op = operator_from_spatial(sp, dims);
      }
    }
    s.level.dims = dims;
    const int d = uniform_int(rng, 4, 32);
    s.level.W = random_matrix(rng, dims.size(), d) / std::sqrt(static_cast<double>(d));
    s.level.b = random_vector(rng, dims.size());
    return s;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

// --- 1 --------------------------------------------------------------------
CriterionResult closed_form_optimality(std::uint64_t seed) {
  Rng rng(seed ^ 0x1001);
  double worst_residual = 0.0;
  double worst_gain = std::numeric_limits<double>::infinity();  // min over probes of term2(q+e d) - term2(q)
  int failures = 0;
  for (int sys = 0; sys < 50; ++sys) {
    const System s = random_system(rng);
    const LinearSolution sol = linear_direction(s.level, s.op);
    worst_residual = std::max(worst_residual, sol.residual);
    if (!(sol.residual <= 1e-8)) ++failures;

    const Eigen::MatrixXd P = s.op.materialize();
    const Eigen::VectorXd mask = s.op.mask();
    const Eigen::VectorXd& q = sol.direction.q;
    const double base = oracle::term2(s.level.W, P, mask, s.level.b, q);
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd delta = random_unit(rng, q.size());
      const double probed = oracle::term2(s.level.W, P, mask, s.level.b, q + 1e-3 * delta);
      worst_gain = std::min(worst_gain, probed - base);
      if (!(base <= probed)) ++failures;
    }
  }
  return {1, "closed-form optimality", failures == 0,
          "50 systems; max normal-eq residual " + fmt(worst_residual) +
              " (<= 1e-8); min term2 increase over 50000 probes " + fmt(worst_gain) + " (>= 0)"};
}

// --- 2 --------------------------------------------------------------------
CriterionResult diagonal_minimizer(std::uint64_t seed) {
  Rng rng(seed ^ 0x2002);
  double worst = 0.0;
  int entries = 0;
  for (int sys = 0; sys < 20; ++sys) {
    const System s = random_system(rng);
    const WalkParams params = neumann_params(s.level, s.op);
    const Eigen::MatrixXd P = s.op.materialize();
    const Eigen::VectorXd mask = s.op.mask();
    for (Eigen::Index i = 0; i < params.m_diag.size(); ++i) {
      const double ref = oracle::diagonal_entry(s.level.W, P, mask, i);
      worst = std::max(worst, std::abs(ref - params.m_diag(i)));
      ++entries;
    }
  }
  return {2, "diagonal minimizer", worst <= 1e-6,
          std::to_string(entries) + " entries over 20 systems; max |M_ii - golden section| " +
              fmt(worst) + " (<= 1e-6)"};
}

// --- 3 --------------------------------------------------------------------
CriterionResult refinement_composition(std::uint64_t seed) {
  Rng rng(seed ^ 0x3003);
  double worst = 0.0;
  for (int n : {2, 3, 4, 7, 16}) {
    for (int trial = 0; trial < 20; ++trial) {
      WalkParams p;
      p.m_diag = Eigen::VectorXd::NullaryExpr(20, [&] { return uniform(rng, 0.3, 0.99); });
      p.q = random_vector(rng, 20);
      const Eigen::VectorXd z = random_vector(rng, 20);
      const WalkParams fine = refine(p, n);
      Eigen::VectorXd zf = z;
      for (int k = 0; k < n; ++k) zf = neumann_step(zf, fine);
      const Eigen::VectorXd once = neumann_step(z, p);
      worst = std::max(worst, (zf - once).norm() / once.norm());
    }
  }
  return {3, "refinement composition", worst <= 1e-10,
          "N in {2,3,4,7,16}, 20 trials each; max relative gap " + fmt(worst) + " (<= 1e-10)"};
}

// --- 4 --------------------------------------------------------------------
CriterionResult endpoint_convergence(std::uint64_t seed) {
  Rng rng(seed ^ 0x4004);
  double worst_end = 0.0;
  double worst_excess = 0.0;  // max of ||e_{k+1}|| - (rho + 1e-12) ||e_k|| beyond the rounding floor
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    WalkParams p;
    p.m_diag = Eigen::VectorXd::NullaryExpr(20, [&] { return uniform(rng, -0.85, 0.85); });
    p.q = random_vector(rng, 20);
    const Eigen::VectorXd target = endpoint(p);
    const double rho = p.spectral_norm();
    Eigen::VectorXd z = 5.0 * random_vector(rng, 20);
    double err = (z - target).norm();
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd next = neumann_step(z, p);
      const double next_err = (next - target).norm();
      // Each iterate is rounded to working precision, which adds at most a few
      // ulps of ||z|| to the error regardless of the contraction.
      const double floor = 8.0 * kEps * (next.norm() + target.norm());
      const double excess = next_err - (rho + 1e-12) * err - floor;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) ok = false;
      z = next;
      err = next_err;
    }
    const double gap = (z - target).norm() / std::max(1.0, target.norm());
    worst_end = std::max(worst_end, gap);
    if (!(gap <= 1e-10)) ok = false;
  }
  return {4, "Neumann endpoint", ok,
          "20 walks, 200 steps; max endpoint gap " + fmt(worst_end) +
              " (<= 1e-10); max contraction excess " + fmt(worst_excess) + " (<= 0)"};
}

// --- 5 --------------------------------------------------------------------
CriterionResult great_circle_walk(std::uint64_t seed) {
  Rng rng(seed ^ 0x5005);
  double worst_norm = 0.0;
  double worst_start = 0.0;
  double worst_end = 0.0;
  const std::vector<ChunkRange> chunks = equal_chunks(120, 6);
  for (int trial = 0; trial < 5; ++trial) {
    const ActiveChunk chunk{trial + 1, chunks[static_cast<std::size_t>(trial)]};
    const Eigen::VectorXd z0 = random_vector(rng, 120);
    const Eigen::VectorXd v = random_unit(rng, 20);
    const Trajectory t = great_circle(z0, chunk, v, 2.0 * std::numbers::pi / 3001.0, StepRange::first(10000));
    const double r0 = z0.segment(static_cast<Eigen::Index>(chunk.range.start), 20).norm();
    for (const Eigen::VectorXd& p : t.points) {
      const double r = p.segment(static_cast<Eigen::Index>(chunk.range.start), 20).norm();
      worst_norm = std::max(worst_norm, std::abs(r - r0) / r0);
    }
    worst_start = std::max(worst_start, (t.points.front() - z0).norm() / z0.norm());

    // Walk exactly to phase pi/2 and compare with ||z0|| v.
    const int k = 50;
    const double delta = (std::numbers::pi / 2.0 - t.theta) / k;
    const Trajectory to_end = great_circle(z0, chunk, v, delta, StepRange::first(k + 1));
    const Eigen::VectorXd expected = great_circle_endpoint(z0, chunk, v);
    Eigen::VectorXd direct = z0;
    direct.segment(static_cast<Eigen::Index>(chunk.range.start), 20) = r0 * v;
    worst_end = std::max({worst_end, (to_end.points.back() - direct).norm() / z0.norm(),
                          (expected - direct).norm() / z0.norm()});
  }
  const bool ok = worst_norm <= 1e-12 && worst_start <= 1e-10 && worst_end <= 1e-10;
  return {5, "great circle", ok,
          "10^4 steps x 5 walks; norm drift " + fmt(worst_norm) + " (<= 1e-12), n=0 error " +
              fmt(worst_start) + " (<= 1e-10), endpoint error " + fmt(worst_end) + " (<= 1e-10)"};
}

// --- 6 --------------------------------------------------------------------
CriterionResult small_circle_walk(std::uint64_t seed) {
  Rng rng(seed ^ 0x6006);
  double worst_drift = 0.0;
  double worst_start = 0.0;
  const std::vector<ChunkRange> chunks = equal_chunks(120, 6);
  for (int trial = 0; trial < 5; ++trial) {
    const ActiveChunk chunk{trial + 1, chunks[static_cast<std::size_t>(trial)]};
    const Eigen::VectorXd z0 = random_vector(rng, 120);
    // Orthonormal pair from a QR of random vectors.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, 20, 2));
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(20, 2);
    const Eigen::VectorXd v = Q.col(0);
    const Eigen::VectorXd v_ref = Q.col(1);
    const Trajectory t = small_circle(z0, chunk, v, v_ref, 0.01, StepRange::first(1000));
    const auto start = static_cast<Eigen::Index>(chunk.range.start);
    const Eigen::VectorXd c0 = z0.segment(start, 20);
    worst_start = std::max(worst_start, (t.points.front() - z0).norm() / z0.norm());

    for (int probe = 0; probe < 100; ++probe) {
      Eigen::VectorXd w = random_vector(rng, 20);
      w -= v.dot(w) * v + v_ref.dot(w) * v_ref;
      w -= v.dot(w) * v + v_ref.dot(w) * v_ref;
      w.normalize();
      for (const Eigen::VectorXd& p : t.points) {
        worst_drift = std::max(worst_drift, std::abs((p.segment(start, 20) - c0).dot(w)));
      }
    }
  }
  const bool ok = worst_drift <= 1e-10 && worst_start <= 1e-10;
  return {6, "small circle", ok,
          "1000 steps x 5 walks, 100 probes each; projection drift " + fmt(worst_drift) +
              " (<= 1e-10), n=0 error " + fmt(worst_start) + " (<= 1e-10)"};
}

// --- 7 --------------------------------------------------------------------
CriterionResult svd_basis(std::uint64_t seed) {
  Rng rng(seed ^ 0x7007);
  double worst_ortho = 0.0;
  double worst_gain = 0.0;
  double worst_eig = 0.0;
  std::vector<std::pair<int, int>> shapes{{24576, 20}, {256, 32}, {64, 20}, {48, 8}, {500, 40}};
  for (auto [rows, cols] : shapes) {
    LevelWeights lw;
    lw.W = random_matrix(rng, rows, cols) / std::sqrt(static_cast<double>(cols));
    lw.dims = {rows, 1, 1};
    const PrincipalBasis basis = principal_directions(lw);
    const Eigen::MatrixXd VtV = basis.V.transpose() * basis.V;
    worst_ortho = std::max(worst_ortho,
                           (VtV - Eigen::MatrixXd::Identity(VtV.rows(), VtV.cols())).cwiseAbs().maxCoeff());
    const Eigen::VectorXd eig = oracle::gram_eigenvalues(lw.W);
    for (Eigen::Index k = 0; k < basis.sigmas.size(); ++k) {
      const double s = basis.sigmas(k);
      worst_gain = std::max(worst_gain, std::abs((lw.W * basis.V.col(k)).norm() - s) / s);
      worst_eig = std::max(worst_eig, std::abs(s * s - eig(k)) / eig(k));
    }
  }
  const bool ok = worst_ortho <= 1e-10 && worst_gain <= 1e-8 && worst_eig <= 1e-8;
  return {7, "SVD principal basis", ok,
          "5 shapes incl. 24576x20; |V^T V - I| " + fmt(worst_ortho) + " (<= 1e-10), ||Wv||/sigma " +
              fmt(worst_gain) + " (<= 1e-8), sigma^2 vs Gram eigenvalues " + fmt(worst_eig) +
              " (<= 1e-8)"};
}

// --- 8 --------------------------------------------------------------------
CriterionResult principal_timing(std::uint64_t seed) {
  const WeightBundle bundle = synthetic_bundle(biggan128_level_dims(), {20, 20, 20, 20, 20, 20}, seed);
  const auto t0 = std::chrono::steady_clock::now();
  double checksum = 0.0;
  for (int level = 1; level <= bundle.level_count(); ++level) {
    checksum += principal_directions(bundle.level(level), level).sigmas.sum();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {8, "principal-direction timing", secs < 5.0 && std::isfinite(checksum),
          "6 BigGAN-128-sized levels in " + std::to_string(secs * 1e3) + " ms (< 5000 ms)"};
}

// --- 9 --------------------------------------------------------------------
CriterionResult toy_equivariance(std::uint64_t seed) {
  Rng rng(seed ^ 0x9009);
  double worst_cyclic = 0.0;
  double worst_zero = 0.0;
  long interior = 0;
  for (int s = 0; s < 10; ++s) {
    for (toygen::Padding padding : {toygen::Padding::circular, toygen::Padding::zero}) {
      toygen::ToyGenSpec spec;
      spec.seed = seed * 1000 + static_cast<std::uint64_t>(s);
      spec.stages = 1 + s % 3;
      spec.channels = 8;
      spec.out_channels = s % 2 == 0 ? 1 : 3;
      spec.padding = padding;
      const toygen::ToyGenerator gen = toygen::build_toy_generator(spec);
      const Eigen::VectorXd z = random_vector(rng, spec.latent_width);
      const int scale = 1 << spec.stages;
      const int side = spec.output_side();
      const char axis = s % 2 == 0 ? 'x' : 'y';
      // Zero padding uses offset 1 so the comparable band is never empty.
      const int offset = padding == toygen::Padding::circular ? 1 + s % 3 : 1;
      const OperatorSpec op = make_shift(spec.first_layer_dims(), axis, offset, Boundary::cyclic);
      const toygen::Tensor3 moved = toygen::apply_operator_at_first_layer(gen, z, op);
      const int dx = axis == 'x' ? offset * scale : 0;
      const int dy = axis == 'y' ? offset * scale : 0;
      const toygen::Tensor3 rolled = toygen::roll(gen.forward(z), dx, dy);

      // Zero padding: only pixels whose receptive field (radius (k/2)(2^L - 1))
      // stays clear of the border and the wrap seam in both images compare.
      const int radius = (spec.kernel / 2) * (scale - 1);
      const int shift = offset * scale;
      for (int c = 0; c < moved.channels; ++c) {
        for (int r = 0; r < side; ++r) {
          for (int col = 0; col < side; ++col) {
            const double diff = std::abs(moved.at(c, r, col) - rolled.at(c, r, col));
            if (padding == toygen::Padding::circular) {
              worst_cyclic = std::max(worst_cyclic, diff);
              continue;
            }
            const int along = axis == 'x' ? col : r;
            if (along - shift - radius >= 0 && along + radius <= side - 1) {
              worst_zero = std::max(worst_zero, diff);
              ++interior;
            }
          }
        }
      }
    }
  }
  const bool ok = worst_cyclic <= 1e-10 && worst_zero <= 1e-8 && interior > 0;
  return {9, "toy-generator equivariance", ok,
          "10 seeds, L in {1,2,3}; circular max diff " + fmt(worst_cyclic) +
              " (<= 1e-10), zero-padding max diff over " + std::to_string(interior) +
              " interior pixels " + fmt(worst_zero) + " (<= 1e-8)"};
}

// --- 10 -------------------------------------------------------------------
CriterionResult monte_carlo_objective(std::uint64_t seed) {
  Rng rng(seed ^ 0xa00a);
  double worst_z = 0.0;
  for (int config = 0; config < 5; ++config) {
    System s;
    do {
      s = random_system(rng);
    } while (s.level.W.rows() > 96);
    const double sigma = uniform(rng, 0.5, 2.0);
    Eigen::VectorXd m;
    Eigen::VectorXd q;
    if (config % 2 == 0) {
      const WalkParams p = neumann_params(s.level, s.op);
      m = p.m_diag;
      q = p.q;
    } else {
      m = Eigen::VectorXd::NullaryExpr(s.level.W.cols(), [&] { return uniform(rng, 0.0, 1.5); });
      q = random_vector(rng, s.level.W.cols());
    }
    const ObjectiveTerms t = objective_value(s.level, s.op, q, m, LatentPrior(sigma));
    const oracle::MonteCarlo mc = oracle::objective_expectation(
        s.level.W, s.level.b, s.op.materialize(), s.op.mask(), m, q, sigma, 100000,
        seed * 31 + static_cast<std::uint64_t>(config));
    worst_z = std::max(worst_z, std::abs(mc.mean - t.total()) / mc.standard_error);
  }
  return {10, "Monte-Carlo objective agreement", worst_z <= 3.0,
          "5 configurations x 10^5 samples; max |empirical - analytic| = " + fmt(worst_z) +
              " standard errors (<= 3)"};
}

// --- 11 -------------------------------------------------------------------
CriterionResult transfer_algebra(std::uint64_t seed) {
  Rng rng(seed ^ 0xb00b);
  const std::vector<ChunkRange> chunks = equal_chunks(120, 6);
  const Eigen::VectorXd src = random_vector(rng, 120);
  const Eigen::VectorXd t1 = random_vector(rng, 120);
  const Eigen::VectorXd t2 = random_vector(rng, 120);
  auto schedule_of = [](int bits) {
    std::set<int> levels;
    for (int l = 0; l < 6; ++l) {
      if (bits & (1 << l)) levels.insert(l + 1);
    }
    return custom_schedule(levels);
  };
  auto swap = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b, int bits) {
    return swap_chunks(a, b, schedule_of(bits), chunks, 120);
  };

  int checks = 0;
  int failures = 0;
  auto expect = [&](bool cond) {
    ++checks;
    if (!cond) ++failures;
  };
  for (int s1 = 1; s1 < 64; ++s1) {
    expect(swap(src, src, s1) == src);
    const Eigen::VectorXd once = swap(src, t1, s1);
    expect(swap(once, t1, s1) == once);
    for (Eigen::Index i = 0; i < 120; ++i) {
      const int level = static_cast<int>(i / 20) + 1;
      const bool scheduled = (s1 >> (level - 1)) & 1;
      expect(once(i) == (scheduled ? t1(i) : src(i)));
    }
    for (int s2 = 1; s2 < 64; ++s2) {
      if (s1 & s2) continue;
      expect(swap(swap(src, t1, s1), t2, s2) == swap(swap(src, t2, s2), t1, s1));
    }
  }
  expect(swap(src, t1, 63) == t1);
  for (const char* preset : {"pose", "color", "texture"}) {
    const Eigen::VectorXd out = swap_chunks(src, t1, preset_schedule(preset), chunks, 120);
    expect(swap(out, t1, 0x3f) == t1);
  }
  return {11, "transfer algebra", failures == 0,
          std::to_string(checks) + " exhaustive checks on a 120-dim, 6-chunk latent; " +
              std::to_string(failures) + " failures"};
}

using Criterion = std::function<CriterionResult(std::uint64_t)>;

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      closed_form_optimality, diagonal_minimizer, refinement_composition, endpoint_convergence,
      great_circle_walk,      small_circle_walk,  svd_basis,              principal_timing,
      toy_equivariance,       monte_carlo_objective, transfer_algebra};
  return all;
}

// Wall-clock budgets per criterion; 0 means none.
double time_limit(int id) {
  switch (id) {
    case 1: return 10.0;
    case 2: return 5.0;
    default: return 0.0;
  }
}

}  // namespace

std::vector<CriterionResult> run(const Options& options) {
  std::vector<CriterionResult> results;
  const auto& all = criteria();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i](options.seed);
    } catch (const std::exception& ex) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + ex.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const double limit = time_limit(id); limit > 0.0 && r.seconds >= limit) {
      r.passed = false;
      r.detail += "; exceeded " + std::to_string(limit) + " s";
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<CriterionResult> check_bundle(const WeightBundle& bundle) {
  std::vector<CriterionResult> out;
  const ValidationReport report = validate_bundle(bundle);
  {
    const auto* bad = report.first_failure();
    out.push_back({0, "bundle validation", bad == nullptr,
                   bad ? bad->name + ": " + bad->detail
                       : std::to_string(report.checks.size()) + " checks passed"});
  }
  if (!report.ok()) return out;

  for (int level = 1; level <= bundle.level_count(); ++level) {
    const LevelWeights& lw = bundle.level(level);
    const std::string tag = "level " + std::to_string(level);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<OperatorSpec> ops;
      if (lw.dims.spatial() > 1) {
        ops.push_back(make_shift(lw.dims, 'x', 1, Boundary::zero_fill));
        ops.push_back(make_shift(lw.dims, 'y', 1, Boundary::zero_fill));
        if (lw.dims.height % 2 == 0 && lw.dims.width % 2 == 0) {
          ops.push_back(make_zoom(lw.dims, ZoomDirection::in));
          ops.push_back(make_zoom(lw.dims, ZoomDirection::out));
        }
      }
      double worst = 0.0;
      for (const OperatorSpec& op : ops) worst = std::max(worst, linear_direction(lw, op).residual);
      if (!ops.empty()) {
        out.push_back({0, tag + " closed-form residual", worst <= 1e-8,
                       std::to_string(ops.size()) + " operators; max residual " + fmt(worst) +
                           " (<= 1e-8)"});
      }
      const PrincipalBasis basis = principal_directions(lw, level);
      const Eigen::MatrixXd VtV = basis.V.transpose() * basis.V;
      const double ortho =
          (VtV - Eigen::MatrixXd::Identity(VtV.rows(), VtV.cols())).cwiseAbs().maxCoeff();
      double gain = 0.0;
      for (Eigen::Index k = 0; k < basis.sigmas.size(); ++k) {
        if (basis.null_direction[static_cast<std::size_t>(k)]) continue;
        gain = std::max(gain, std::abs((lw.W * basis.V.col(k)).norm() - basis.sigmas(k)) /
                                  basis.sigmas(k));
      }
      out.push_back({0, tag + " principal basis", ortho <= 1e-10 && gain <= 1e-8,
                     "|V^T V - I| " + fmt(ortho) + ", ||Wv||/sigma " + fmt(gain)});
    } catch (const std::exception& ex) {
      out.push_back({0, tag, false, std::string("exception: ") + ex.what()});
    }
    out.back().seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return out;
}

void print(std::ostream& out, const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  ";
    if (r.id > 0) {
      out << std::setw(2) << r.id << "  ";
    } else {
      out << " -  ";
    }
    out << r.name << ": " << r.detail << " (" << std::fixed << std::setprecision(2) << r.seconds
        << " s)\n";
    out.unsetf(std::ios::floatfield);
  }
}

std::string to_json(const std::vector<CriterionResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const CriterionResult& r : results) {
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                 {"seconds", r.seconds}});
  }
  return j.dump(2);
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

}  // namespace steer::acceptance
