// steer: command-line front end for steerlab.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "steerlab/acceptance.hpp"
#include "steerlab/bundle.hpp"
#include "steerlab/closed_form.hpp"
#include "steerlab/error.hpp"
#include "steerlab/export.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/kernels.hpp"
#include "steerlab/npy.hpp"
#include "steerlab/operators.hpp"
#include "steerlab/principal.hpp"
#include "steerlab/toygen.hpp"
#include "steerlab/transfer.hpp"
#include "steerlab/walks.hpp"

namespace {

using json = nlohmann::json;
using steer::DataError;
using steer::UsageError;

json to_json_array(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_array(m.row(i).transpose()));
  return rows;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("STEER_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("STEER_SEED is not a nonnegative integer: ") + env);
  }
}

void check_format(const std::string& format) {
  if (format != "npy" && format != "json") throw UsageError("--format must be json or npy, got " + format);
}

// Operator flags shared by direction, walk and toygen.
struct OperatorFlags {
  std::string op;
  int offset = 1;
  std::string boundary = "zero-fill";
  int quarter_turns = 1;
  std::string custom;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--op", op,
                                "shift-x | shift-y | zoom-in | zoom-out | rot90 | identity | custom");
    if (required) opt->required();
    app->add_option("--offset", offset, "shift offset in elements (signed)");
    app->add_option("--boundary", boundary, "shift boundary: zero-fill | cyclic");
    app->add_option("--quarter-turns", quarter_turns, "rot90: clockwise quarter turns");
    app->add_option("--custom", custom, "custom operator: NPY of shape (H*W, H*W)");
  }

  bool given() const { return !op.empty(); }

  steer::OperatorSpec build(const steer::Dims& dims) const {
    using steer::OperatorKind;
    switch (steer::parse_operator_kind(op)) {
      case OperatorKind::shift_x: return steer::make_shift(dims, 'x', offset, steer::parse_boundary(boundary));
      case OperatorKind::shift_y: return steer::make_shift(dims, 'y', offset, steer::parse_boundary(boundary));
      case OperatorKind::zoom_in: return steer::make_zoom(dims, steer::ZoomDirection::in);
      case OperatorKind::zoom_out: return steer::make_zoom(dims, steer::ZoomDirection::out);
      case OperatorKind::rot90: return steer::make_rot90(dims, quarter_turns);
      case OperatorKind::identity: return steer::make_identity(dims);
      case OperatorKind::custom:
        if (custom.empty()) throw UsageError("--op custom needs --custom FILE");
        return steer::load_custom_operator(custom, dims);
    }
    throw UsageError("unknown operator " + op);
  }
};

Eigen::VectorXd random_latent(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = dist(rng);
  return z;
}

Eigen::VectorXd load_latent(const std::string& path, std::size_t latent_dim, const std::string& flag) {
  const Eigen::VectorXd z = steer::read_vector(path);
  if (static_cast<std::size_t>(z.size()) != latent_dim) {
    throw DataError(flag + " " + path + ": length " + std::to_string(z.size()) + ", expected latent_dim " +
                    std::to_string(latent_dim));
  }
  return z;
}

void require_level(const steer::WeightBundle& bundle, int level) {
  if (level < 1 || level > bundle.level_count()) {
    throw UsageError("--level " + std::to_string(level) + " outside 1.." + std::to_string(bundle.level_count()));
  }
}

// --- import -----------------------------------------------------------------

struct ImportCmd {
  std::string in;
  std::string synthetic;
  std::string out;
  std::string report;
  int chunk_width = 20;
  std::optional<std::uint64_t> seed;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("import", "validate a weight container and write it in canonical form");
    auto* in_opt = app->add_option("--in", in, "container to import (zip of NPY arrays + meta.json)");
    auto* syn_opt = app->add_option("--synthetic", synthetic, "generate instead: biggan128 | toy");
    in_opt->excludes(syn_opt);
    app->add_option("--out", out, "canonical container to write");
    app->add_option("--report", report, "validation report JSON");
    app->add_option("--chunk-width", chunk_width, "synthetic: latent width per level");
    app->add_option("--seed", seed, "synthetic: RNG seed (default STEER_SEED or 0)");
    app->callback([this] { run(); });
  }

  void run() const {
    steer::WeightBundle bundle;
    if (!in.empty()) {
      // Validation happens below so that the full report can be written.
      bundle = steer::parse_bundle_unvalidated(steer::io::read_file(in), in);
    } else if (synthetic == "biggan128") {
      bundle = steer::synthetic_bundle(steer::biggan128_level_dims(), std::vector<int>(6, chunk_width),
                                       seed.value_or(default_seed()));
    } else if (synthetic == "toy") {
      steer::toygen::ToyGenSpec spec;
      spec.seed = seed.value_or(default_seed());
      bundle = steer::toygen::build_toy_generator(spec).export_bundle();
    } else if (!synthetic.empty()) {
      throw UsageError("--synthetic must be biggan128 or toy, got " + synthetic);
    } else {
      throw UsageError("import needs --in FILE or --synthetic NAME");
    }
    const steer::ValidationReport rep = steer::validate_bundle(bundle);
    if (!report.empty()) steer::io::write_file_atomic(report, rep.to_json());
    if (const auto* bad = rep.first_failure()) throw DataError(bad->name + ": " + bad->detail);
    if (!out.empty()) steer::save_bundle(bundle, out);
    std::cout << "levels " << bundle.level_count() << ", latent_dim " << bundle.latent_dim << ", "
              << rep.checks.size() << " checks passed\n";
  }
};

// --- direction --------------------------------------------------------------

struct DirectionCmd {
  std::string bundle_path;
  int level = 1;
  OperatorFlags op;
  std::optional<int> principal;
  double alpha = 1.0;
  std::string out;
  std::string format = "npy";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("direction", "closed-form or principal steering direction for one level");
    app->add_option("--bundle", bundle_path, "weight container")->required();
    app->add_option("--level", level, "hierarchy level (1-based)");
    op.add(app, false);
    app->add_option("--principal", principal, "use principal direction k (1-based) instead of --op");
    app->add_option("--alpha", alpha, "scale applied to q");
    app->add_option("--out", out, "output file")->required();
    app->add_option("--format", format, "npy (with .json sidecar) | json");
    app->callback([this] { run(); });
  }

  void run() const {
    check_format(format);
    if (op.given() == principal.has_value()) throw UsageError("direction needs exactly one of --op or --principal");
    const steer::WeightBundle bundle = steer::load_bundle(bundle_path);
    require_level(bundle, level);
    const steer::LevelWeights& lw = bundle.level(level);

    steer::SteeringDirection dir;
    std::optional<double> residual;
    std::optional<int> rank;
    if (principal) {
      const steer::PrincipalBasis basis = steer::principal_directions(lw, level);
      if (*principal < 1 || *principal > basis.count()) {
        throw UsageError("--principal " + std::to_string(*principal) + " outside 1.." + std::to_string(basis.count()));
      }
      dir.q = basis.V.col(*principal - 1);
      dir.level = level;
      dir.provenance.source = steer::Provenance::Source::principal;
      dir.provenance.principal_index = *principal;
    } else {
      const steer::LinearSolution sol = steer::linear_direction(lw, op.build(lw.dims), level);
      if (!sol.diagnostic.empty()) std::cerr << "warning: " << sol.diagnostic << "\n";
      dir = sol.direction;
      residual = sol.residual;
      rank = sol.rank;
    }
    if (alpha != 1.0) dir = steer::scale_direction(dir, alpha);

    if (format == "npy") {
      steer::write_direction(out, dir, residual, rank);
    } else {
      json j = json::parse(steer::direction_json(dir, residual, rank));
      j["q"] = to_json_array(dir.q);
      steer::io::write_file_atomic(out, j.dump(2) + "\n");
    }
  }
};

// --- walk -------------------------------------------------------------------

struct WalkCmd {
  std::string bundle_path;
  std::string kind = "neumann";
  int level = 1;
  OperatorFlags op;
  std::optional<int> principal;
  std::string direction;
  std::optional<int> reference;
  std::string z0_path;
  double sigma = 1.0;
  std::optional<std::uint64_t> seed;
  int steps = 10;
  int start = 0;
  int refine = 1;
  std::optional<double> delta;
  std::optional<double> match_linear;
  double alpha = 1.0;
  bool require_endpoint = false;
  std::string out;
  std::string format = "npy";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("walk", "latent trajectory on one level's chunk");
    app->add_option("--bundle", bundle_path, "weight container")->required();
    app->add_option("--kind", kind, "neumann | linear | great-circle | small-circle");
    app->add_option("--level", level, "hierarchy level (1-based)");
    op.add(app, false);
    app->add_option("--principal", principal, "direction v = principal direction k");
    app->add_option("--direction", direction, "direction v from an NPY vector");
    app->add_option("--reference", reference,
                    "small-circle: v_ref = principal direction k (default: least dominant)");
    app->add_option("--z0", z0_path, "start latent (NPY, length latent_dim); default N(0, sigma^2) draw");
    app->add_option("--sigma", sigma, "prior scale for the default z0 draw");
    app->add_option("--seed", seed, "seed for the default z0 draw (default STEER_SEED or 0)");
    app->add_option("--steps", steps, "number of trajectory points, including the start");
    app->add_option("--start", start, "index of the first point (negative walks backwards)");
    app->add_option("--refine", refine, "neumann: N-times finer steps");
    app->add_option("--delta", delta, "angular step (circles, default 0.1)");
    app->add_option("--match-linear", match_linear, "circles: angular step matching this linear step length");
    app->add_option("--alpha", alpha, "linear: step scale");
    app->add_flag("--require-endpoint", require_endpoint, "neumann: fail (exit 3) if no endpoint exists");
    app->add_option("--out", out, "output file")->required();
    app->add_option("--format", format, "npy (with .json sidecar) | json");
    app->callback([this] { run(); });
  }

  Eigen::VectorXd pick_direction(const steer::LevelWeights& lw, std::optional<steer::PrincipalBasis>& basis,
                                 json& meta) const {
    const int sources = int(op.given()) + int(principal.has_value()) + int(!direction.empty());
    if (sources != 1) throw UsageError("walk needs exactly one of --op, --principal, --direction");
    if (op.given()) {
      meta["direction"] = "operator " + op.op;
      return steer::linear_direction(lw, op.build(lw.dims), level).direction.q;
    }
    if (principal) {
      if (*principal < 1 || *principal > basis->count()) {
        throw UsageError("--principal " + std::to_string(*principal) + " outside 1.." + std::to_string(basis->count()));
      }
      meta["direction"] = "principal " + std::to_string(*principal);
      return basis->V.col(*principal - 1);
    }
    meta["direction"] = "file " + direction;
    const Eigen::VectorXd v = steer::read_vector(direction);
    if (v.size() != lw.W.cols()) {
      throw DataError("--direction length " + std::to_string(v.size()) + ", level width " +
                      std::to_string(lw.W.cols()));
    }
    return v;
  }

  void run() const {
    check_format(format);
    if (steps < 1) throw UsageError("--steps must be >= 1");
    const steer::WeightBundle bundle = steer::load_bundle(bundle_path);
    require_level(bundle, level);
    const steer::LevelWeights& lw = bundle.level(level);
    const steer::ActiveChunk chunk = steer::active_chunk(bundle, level);
    const std::uint64_t s = seed.value_or(default_seed());
    const Eigen::VectorXd z0 =
        z0_path.empty() ? random_latent(bundle.latent_dim, sigma, s) : load_latent(z0_path, bundle.latent_dim, "--z0");
    const steer::WalkKind walk_kind = steer::parse_walk_kind(kind);
    const steer::StepRange range{start, start + steps};

    json meta;
    meta["seed"] = s;
    steer::Trajectory t;
    if (walk_kind == steer::WalkKind::neumann) {
      if (!op.given()) throw UsageError("--kind neumann needs --op");
      if (start != 0) throw UsageError("--start is not supported for neumann walks");
      steer::WalkParams params = steer::neumann_params(lw, op.build(lw.dims));
      params.sigma_z = sigma;
      if (refine != 1) params = steer::refine(params, refine);
      if (require_endpoint) (void)steer::endpoint(params);
      t = steer::neumann_walk(z0, chunk, params, steps);
      meta["refine"] = refine;
      meta["m_diag"] = to_json_array(params.m_diag);
      meta["q"] = to_json_array(params.q);
      meta["direction"] = "operator " + op.op;
    } else {
      std::optional<steer::PrincipalBasis> basis;
      if (principal || walk_kind == steer::WalkKind::small_circle) basis = steer::principal_directions(lw, level);
      const Eigen::VectorXd q = pick_direction(lw, basis, meta);
      if (walk_kind == steer::WalkKind::linear) {
        t = steer::linear_walk(z0, chunk, q, alpha, range);
      } else {
        const Eigen::VectorXd v = steer::unit(q);
        std::optional<Eigen::VectorXd> v_ref;
        if (walk_kind == steer::WalkKind::small_circle) {
          const int k = reference.value_or(static_cast<int>(basis->count()));
          if (k < 1 || k > basis->count()) throw UsageError("--reference outside 1.." + std::to_string(basis->count()));
          v_ref = basis->V.col(k - 1);
          meta["reference"] = k;
        }
        if (delta && match_linear) throw UsageError("--delta and --match-linear are exclusive");
        double step = delta.value_or(0.1);
        if (match_linear) {
          const steer::AngularSteps a = steer::match_step_sizes(*match_linear, z0, chunk, v, v_ref);
          step = v_ref ? *a.small : a.great;
          meta["matched_linear_step"] = *match_linear;
        }
        t = v_ref ? steer::small_circle(z0, chunk, v, *v_ref, step, range)
                  : steer::great_circle(z0, chunk, v, step, range);
      }
    }

    if (format == "npy") {
      steer::write_trajectory(out, t, meta.dump());
    } else {
      json j = json::parse(steer::trajectory_json(t, meta.dump()));
      j["points"] = to_json_rows(t.as_matrix());
      steer::io::write_file_atomic(out, j.dump(2) + "\n");
    }
  }
};

// --- principal --------------------------------------------------------------

struct PrincipalCmd {
  std::string bundle_path;
  std::vector<int> levels;
  std::string out;
  std::string format = "npy";
  std::string compare;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("principal", "SVD principal directions of each level's W");
    app->add_option("--bundle", bundle_path, "weight container")->required();
    app->add_option("--level", levels, "levels to process (default: all)")->delimiter(',');
    app->add_option("--out", out, "output prefix; writes <prefix>.levelN.{V,sigma}.npy + .json")->required();
    app->add_option("--format", format, "npy | json");
    app->add_option("--compare", compare,
                    "NPY basis (d x k); also writes the |cos| correlation matrix against it");
    app->callback([this] { run(); });
  }

  void run() const {
    check_format(format);
    const steer::WeightBundle bundle = steer::load_bundle(bundle_path);
    std::vector<int> todo = levels;
    if (todo.empty()) {
      for (int l = 1; l <= bundle.level_count(); ++l) todo.push_back(l);
    }
    std::optional<Eigen::MatrixXd> other;
    if (!compare.empty()) other = steer::npy::to_matrix(steer::npy::load(compare), compare);

    for (int level : todo) {
      require_level(bundle, level);
      const steer::PrincipalBasis basis = steer::principal_directions(bundle.level(level), level);
      const std::string prefix = out + ".level" + std::to_string(level);
      std::optional<Eigen::MatrixXd> corr;
      if (other) {
        if (other->rows() != basis.V.rows()) {
          throw DataError("--compare has " + std::to_string(other->rows()) + " rows, level " +
                          std::to_string(level) + " basis has " + std::to_string(basis.V.rows()));
        }
        corr = steer::correlation_matrix(basis.V, *other);
      }
      if (format == "npy") {
        steer::write_basis(prefix, basis);
        if (corr) steer::npy::save(prefix + ".corr.npy", steer::npy::from_matrix(*corr));
      } else {
        json j = json::parse(steer::basis_json(basis));
        j["sigmas"] = to_json_array(basis.sigmas);
        j["V"] = to_json_rows(basis.V);
        if (corr) j["correlation"] = to_json_rows(*corr);
        steer::io::write_file_atomic(prefix + ".json", j.dump(2) + "\n");
      }
    }
  }
};

// --- transfer ---------------------------------------------------------------

struct TransferCmd {
  std::string schedule = "pose";
  std::vector<int> levels;
  std::string bundle_path;
  int chunks = 6;
  std::string src;
  std::string tgt;
  std::optional<int> src_class;
  std::optional<int> tgt_class;
  bool swap_class = false;
  std::string out;
  std::string format = "npy";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("transfer", "copy the chunks of scheduled levels from a target code");
    app->add_option("--schedule", schedule, "pose | color | texture | custom");
    app->add_option("--levels", levels, "custom schedule levels, e.g. 2,3")->delimiter(',');
    app->add_option("--bundle", bundle_path, "container supplying chunk ranges");
    app->add_option("--chunks", chunks, "without --bundle: equal chunks over the latent");
    app->add_option("--src", src, "source latent (NPY)")->required();
    app->add_option("--tgt", tgt, "target latent (NPY)")->required();
    app->add_option("--src-class", src_class, "class label of the source");
    app->add_option("--tgt-class", tgt_class, "class label of the target");
    app->add_flag("--swap-class", swap_class, "take the class label from the target");
    app->add_option("--out", out, "output file")->required();
    app->add_option("--format", format, "npy (with .json sidecar) | json");
    app->callback([this] { run(); });
  }

  void run() const {
    check_format(format);
    steer::TransferSchedule sched;
    if (schedule == "custom") {
      if (levels.empty()) throw UsageError("--schedule custom needs --levels");
      sched = steer::custom_schedule(std::set<int>(levels.begin(), levels.end()));
    } else {
      if (!levels.empty()) throw UsageError("--levels only applies to --schedule custom");
      sched = steer::preset_schedule(schedule);
    }
    const Eigen::VectorXd zs = steer::read_vector(src);
    const Eigen::VectorXd zt = steer::read_vector(tgt);
    if (zs.size() != zt.size()) {
      throw DataError("--src has length " + std::to_string(zs.size()) + ", --tgt has " + std::to_string(zt.size()));
    }

    steer::WeightBundle bundle;
    if (!bundle_path.empty()) {
      bundle = steer::load_bundle(bundle_path);
    } else {
      bundle.latent_dim = static_cast<std::size_t>(zs.size());
      bundle.chunk_ranges = steer::equal_chunks(bundle.latent_dim, chunks);
    }
    if (static_cast<std::size_t>(zs.size()) != bundle.latent_dim) {
      throw DataError("latent length " + std::to_string(zs.size()) + " != latent_dim " +
                      std::to_string(bundle.latent_dim));
    }
    const steer::LatentCode result =
        steer::swap_codes({zs, src_class}, {zt, tgt_class}, sched, bundle, swap_class);

    json meta;
    meta["schedule"] = sched.name;
    meta["levels"] = std::vector<int>(sched.levels.begin(), sched.levels.end());
    meta["class_label"] = result.class_label ? json(*result.class_label) : json(nullptr);
    if (format == "npy") {
      steer::npy::save(out, steer::npy::from_vector(result.z));
      steer::io::write_file_atomic(steer::sidecar_path(out), meta.dump(2) + "\n");
    } else {
      meta["z"] = to_json_array(result.z);
      steer::io::write_file_atomic(out, meta.dump(2) + "\n");
    }
  }
};

// --- toygen -----------------------------------------------------------------

struct ToygenCmd {
  steer::toygen::ToyGenSpec spec;
  std::optional<std::uint64_t> seed;
  std::string padding = "circular";
  std::string bundle_out;
  std::string z_path;
  std::string image;
  OperatorFlags op;
  std::string fidelity;
  int samples = 10000;
  double sigma = 1.0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("toygen", "seeded toy generator: export, render, fidelity report");
    app->add_option("--seed", seed, "generator seed (default STEER_SEED or 0)");
    app->add_option("--latent-width", spec.latent_width, "latent length");
    app->add_option("--channels", spec.channels, "first-layer channels");
    app->add_option("--stages", spec.stages, "upsample + conv stages (L)");
    app->add_option("--kernel", spec.kernel, "odd convolution kernel size");
    app->add_option("--padding", padding, "circular | zero");
    app->add_option("--out-channels", spec.out_channels, "1 (PGM) or 3 (PPM)");
    app->add_option("--export", bundle_out, "write the first layer as a weight container");
    app->add_option("--z", z_path, "latent to render (NPY); default N(0, I) draw from the seed");
    app->add_option("--image", image, "render forward(z) to a PGM/PPM");
    op.add(app, false);
    app->add_option("--fidelity", fidelity, "write the steering fidelity report (JSON) for --op");
    app->add_option("--samples", samples, "Monte-Carlo samples for --fidelity");
    app->add_option("--sigma", sigma, "latent prior scale for --fidelity");
    app->callback([this] { run(); });
  }

  void run() {
    spec.seed = seed.value_or(default_seed());
    spec.padding = steer::toygen::parse_padding(padding);
    if (bundle_out.empty() && image.empty() && fidelity.empty()) {
      throw UsageError("toygen needs at least one of --export, --image, --fidelity");
    }
    const steer::toygen::ToyGenerator gen = steer::toygen::build_toy_generator(spec);
    if (!bundle_out.empty()) steer::save_bundle(gen.export_bundle(), bundle_out);
    if (!image.empty()) {
      const Eigen::VectorXd z = z_path.empty()
                                    ? random_latent(static_cast<std::size_t>(spec.latent_width), 1.0, spec.seed)
                                    : load_latent(z_path, static_cast<std::size_t>(spec.latent_width), "--z");
      const auto img = op.given()
                           ? steer::toygen::apply_operator_at_first_layer(gen, z, op.build(spec.first_layer_dims()))
                           : gen.forward(z);
      steer::toygen::write_pnm(img, image);
    }
    if (!fidelity.empty()) {
      if (!op.given()) throw UsageError("--fidelity needs --op");
      const auto report = steer::toygen::steering_fidelity_report(
          gen, op.build(spec.first_layer_dims()), samples, steer::LatentPrior(sigma), spec.seed);
      steer::io::write_file_atomic(fidelity, report.to_json());
    }
  }
};

// --- verify -----------------------------------------------------------------

struct VerifyCmd {
  std::string bundle_path;
  std::vector<int> only;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  bool skip_suite = false;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("verify", "run the acceptance suite (and bundle invariants)");
    app->add_option("--bundle", bundle_path, "also check this container's invariants");
    app->add_option("--only", only, "criteria to run, e.g. 1,3,5")->delimiter(',');
    app->add_option("--seed", seed, "suite seed (default STEER_SEED or 0)");
    app->add_option("--format", format, "text | json");
    app->add_flag("--bundle-only", skip_suite, "skip the built-in suite");
    app->callback([this] { run(); });
  }

  void run() const {
    if (format != "text" && format != "json") throw UsageError("--format must be text or json");
    for (int id : only) {
      if (id < 1 || id > 11) throw UsageError("--only ids must be in 1..11");
    }
    std::vector<steer::acceptance::CriterionResult> results;
    bool bundle_invalid = false;
    if (!bundle_path.empty()) {
      const steer::WeightBundle bundle = steer::load_bundle(bundle_path);
      results = steer::acceptance::check_bundle(bundle);
      bundle_invalid = !results.empty() && !results.front().passed;
    }
    if (!skip_suite) {
      const auto suite = steer::acceptance::run({seed.value_or(default_seed()), only});
      results.insert(results.end(), suite.begin(), suite.end());
    }
    if (format == "json") {
      std::cout << steer::acceptance::to_json(results) << "\n";
    } else {
      std::cout << "kernels: " << steer::kernels::active().name << "\n";
      steer::acceptance::print(std::cout, results);
    }
    if (bundle_invalid) throw DataError("bundle failed validation");
    if (!steer::acceptance::all_passed(results)) {
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      throw steer::NumericalError(std::to_string(failed) + " check(s) failed");
    }
  }
};

int fail(int code, const std::string& message) {
  std::string line = message;
  for (char& c : line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "E:" << code << ": " << line << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steer: closed-form latent steering for hierarchical generators"};
  app.require_subcommand(1, 1);
  ImportCmd import_cmd;
  DirectionCmd direction_cmd;
  WalkCmd walk_cmd;
  PrincipalCmd principal_cmd;
  TransferCmd transfer_cmd;
  ToygenCmd toygen_cmd;
  VerifyCmd verify_cmd;
  import_cmd.add(app);
  direction_cmd.add(app);
  walk_cmd.add(app);
  principal_cmd.add(app);
  transfer_cmd.add(app);
  toygen_cmd.add(app);
  verify_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(1, e.what());
  } catch (const steer::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(3, "out of memory");
  } catch (const std::exception& e) {
    return fail(2, e.what());
  }
  return 0;
}
