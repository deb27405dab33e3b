#include "steerlab/toygen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "steerlab/error.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/kernels.hpp"

namespace steer::toygen {
namespace {

constexpr double kLeakySlope = 0.2;

Tensor3 upsample2x(const Tensor3& in) {
  Tensor3 out(in.channels, in.height * 2, in.width * 2);
  for (int c = 0; c < in.channels; ++c) {
    for (int r = 0; r < out.height; ++r) {
      for (int col = 0; col < out.width; ++col) out.at(c, r, col) = in.at(c, r / 2, col / 2);
    }
  }
  return out;
}

// dst[x] += w * src[x + dx] along one row, wrapping or clipping at the ends.
void accumulate_row(const kernels::KernelTable& k, double w, const double* src, double* dst,
                    int width, int dx, Padding padding) {
  if (dx >= 0) {
    k.axpy(w, src + dx, dst, static_cast<std::size_t>(width - dx));
    if (padding == Padding::circular && dx > 0) {
      k.axpy(w, src, dst + (width - dx), static_cast<std::size_t>(dx));
    }
  } else {
    k.axpy(w, src, dst - dx, static_cast<std::size_t>(width + dx));
    if (padding == Padding::circular) {
      k.axpy(w, src + (width + dx), dst, static_cast<std::size_t>(-dx));
    }
  }
}

Tensor3 conv(const Tensor3& in, const ConvStage& stage, Padding padding) {
  const kernels::KernelTable& k = kernels::active();
  const int pad = stage.kernel / 2;
  Tensor3 out(stage.out_channels, in.height, in.width);
  for (int co = 0; co < stage.out_channels; ++co) {
    for (int r = 0; r < out.height; ++r) {
      std::fill_n(&out.at(co, r, 0), out.width, stage.bias[static_cast<std::size_t>(co)]);
    }
    for (int ci = 0; ci < stage.in_channels; ++ci) {
      for (int ky = 0; ky < stage.kernel; ++ky) {
        const int dy = ky - pad;
        for (int kx = 0; kx < stage.kernel; ++kx) {
          const int dx = kx - pad;
          const double w = stage.w(co, ci, ky, kx);
          for (int r = 0; r < out.height; ++r) {
            int sr = r + dy;
            if (padding == Padding::circular) {
              sr = (sr % in.height + in.height) % in.height;
            } else if (sr < 0 || sr >= in.height) {
              continue;
            }
            accumulate_row(k, w, in.data.data() + (std::size_t(ci) * in.height + sr) * in.width, &out.at(co, r, 0), in.width, dx, padding);
          }
        }
      }
    }
  }
  return out;
}

void leaky(Tensor3& t) {
  for (double& v : t.data) v = v >= 0.0 ? v : kLeakySlope * v;
}

}  // namespace

Padding parse_padding(std::string_view name) {
  if (name == "circular") return Padding::circular;
  if (name == "zero") return Padding::zero;
  throw UsageError("unknown padding '" + std::string(name) + "' (circular or zero)");
}

ToyGenerator::ToyGenerator(ToyGenSpec spec, LevelWeights first, std::vector<ConvStage> stages)
    : spec_(spec), first_(std::move(first)), stages_(std::move(stages)) {}

WeightBundle ToyGenerator::export_bundle() const {
  WeightBundle bundle;
  bundle.levels.push_back(first_);
  bundle.latent_dim = static_cast<std::size_t>(spec_.latent_width);
  bundle.chunk_ranges.push_back({0, bundle.latent_dim});
  return bundle;
}

Tensor3 ToyGenerator::synthesize(const Eigen::VectorXd& h) const {
  const Dims d = first_.dims;
  if (h.size() != d.size()) {
    throw DataError("first-layer tensor has length " + std::to_string(h.size()) + ", expected " +
                    std::to_string(d.size()));
  }
  Tensor3 t(d.channels, d.height, d.width);
  std::copy(h.data(), h.data() + h.size(), t.data.begin());
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    t = conv(upsample2x(t), stages_[s], spec_.padding);
    if (s + 1 < stages_.size()) leaky(t);
  }
  return t;
}

Tensor3 ToyGenerator::forward(const Eigen::VectorXd& z) const {
  if (z.size() != first_.W.cols()) {
    throw DataError("latent has length " + std::to_string(z.size()) + ", generator expects " +
                    std::to_string(first_.W.cols()));
  }
  return synthesize(first_.W * z + first_.b);
}

std::vector<Tensor3> ToyGenerator::forward(const std::vector<Eigen::VectorXd>& batch) const {
  std::vector<Tensor3> out;
  out.reserve(batch.size());
  for (const Eigen::VectorXd& z : batch) out.push_back(forward(z));
  return out;
}

ToyGenerator build_toy_generator(const ToyGenSpec& spec) {
  if (spec.latent_width < 1 || spec.channels < 1 || spec.stages < 1 || spec.kernel < 1 ||
      spec.kernel % 2 == 0 || (spec.out_channels != 1 && spec.out_channels != 3)) {
    throw UsageError("invalid toy generator spec");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LevelWeights first;
  first.dims = spec.first_layer_dims();
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(spec.latent_width));
  first.W = Eigen::MatrixXd(first.dims.size(), spec.latent_width);
  for (Eigen::Index j = 0; j < first.W.cols(); ++j) {
    for (Eigen::Index i = 0; i < first.W.rows(); ++i) first.W(i, j) = w_scale * normal(rng);
  }
  first.b = Eigen::VectorXd(first.dims.size());
  for (Eigen::Index i = 0; i < first.b.size(); ++i) first.b(i) = normal(rng);

  std::vector<ConvStage> stages;
  for (int s = 0; s < spec.stages; ++s) {
    ConvStage st;
    st.in_channels = spec.channels;
    st.out_channels = s + 1 == spec.stages ? spec.out_channels : spec.channels;
    st.kernel = spec.kernel;
    const double scale = 1.0 / std::sqrt(static_cast<double>(st.in_channels * st.kernel * st.kernel));
    st.weights.resize(std::size_t(st.out_channels) * st.in_channels * st.kernel * st.kernel);
    for (double& w : st.weights) w = scale * normal(rng);
    st.bias.resize(static_cast<std::size_t>(st.out_channels));
    for (double& b : st.bias) b = scale * normal(rng);
    stages.push_back(std::move(st));
  }
  return ToyGenerator(spec, std::move(first), std::move(stages));
}

Tensor3 apply_operator_at_first_layer(const ToyGenerator& gen, const Eigen::VectorXd& z,
                                      const OperatorSpec& op) {
  const LevelWeights& lw = gen.first_layer();
  if (!(op.dims == lw.dims)) throw DataError("operator dims do not match the first layer");
  if (z.size() != lw.W.cols()) throw DataError("latent length does not match the generator");
  return gen.synthesize(op.apply(Eigen::VectorXd(lw.W * z + lw.b)));
}

Tensor3 roll(const Tensor3& image, int dx, int dy) {
  Tensor3 out(image.channels, image.height, image.width);
  for (int c = 0; c < image.channels; ++c) {
    for (int r = 0; r < image.height; ++r) {
      const int sr = ((r - dy) % image.height + image.height) % image.height;
      for (int col = 0; col < image.width; ++col) {
        const int sc = ((col - dx) % image.width + image.width) % image.width;
        out.at(c, r, col) = image.at(c, sr, sc);
      }
    }
  }
  return out;
}

std::string encode_pnm(const Tensor3& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw UsageError("PNM output needs 1 or 3 channels");
  }
  const auto [lo_it, hi_it] = std::minmax_element(image.data.begin(), image.data.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  std::string out = (image.channels == 1 ? "P5\n" : "P6\n") + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  for (int r = 0; r < image.height; ++r) {
    for (int col = 0; col < image.width; ++col) {
      for (int c = 0; c < image.channels; ++c) {
        const double t = span > 0.0 ? (image.at(c, r, col) - lo) / span : 0.0;
        out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
      }
    }
  }
  return out;
}

void write_pnm(const Tensor3& image, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_pnm(image));
}

std::string FidelityReport::to_json() const {
  auto stat = [](const FidelityStat& s) {
    return nlohmann::json{{"empirical_mean", s.empirical_mean},
                          {"standard_error", s.standard_error},
                          {"analytic", s.analytic},
                          {"q_norm", s.q_norm}};
  };
  nlohmann::json j;
  j["samples"] = samples;
  j["closed_form"] = stat(closed_form);
  j["closed_form"]["term1"] = closed_form_terms.term1;
  j["closed_form"]["term2"] = closed_form_terms.term2;
  j["zero"] = stat(zero);
  j["random"] = nlohmann::json::array();
  for (const FidelityStat& s : random) j["random"].push_back(stat(s));
  j["closed_form_is_min"] = closed_form_is_min;
  return j.dump(2);
}

FidelityReport steering_fidelity_report(const ToyGenerator& gen, const OperatorSpec& op,
                                        int n_samples, const LatentPrior& prior,
                                        std::uint64_t seed) {
  if (n_samples < 2) throw UsageError("fidelity report needs at least two samples");
  const LevelWeights& lw = gen.first_layer();
  const Eigen::VectorXd q_star = linear_direction(lw, op).direction.q;
  const Eigen::VectorXd mask = op.mask();
  const Eigen::MatrixXd A = lw.W - op.apply(lw.W);  // (I - P) W
  const Eigen::VectorXd moved_b = lw.b - op.apply(lw.b);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Eigen::VectorXd> qs{q_star, Eigen::VectorXd::Zero(q_star.size())};
  const double norm = q_star.norm();
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(q_star.size(), [&] { return normal(rng); });
    qs.push_back(norm * r / r.norm());
  }

  // Common random numbers: every candidate q sees the same z draws.
  std::vector<double> sum(qs.size(), 0.0);
  std::vector<double> sum_sq(qs.size(), 0.0);
  std::vector<Eigen::VectorXd> offsets;
  for (const Eigen::VectorXd& q : qs) offsets.push_back(lw.W * q + moved_b);
  Eigen::VectorXd z(q_star.size());
  Eigen::VectorXd residual(lw.W.rows());
  for (int s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = prior.sigma() * normal(rng);
    const Eigen::VectorXd Az = A * z;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      residual = mask.cwiseProduct(Az + offsets[k]);
      const double v = residual.squaredNorm();
      sum[k] += v;
      sum_sq[k] += v * v;
    }
  }

  FidelityReport report;
  report.samples = n_samples;
  const double n = static_cast<double>(n_samples);
  std::vector<FidelityStat> stats;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    FidelityStat st;
    st.empirical_mean = sum[k] / n;
    const double var = std::max(0.0, (sum_sq[k] - n * st.empirical_mean * st.empirical_mean) / (n - 1.0));
    st.standard_error = std::sqrt(var / n);
    const ObjectiveTerms t = objective_value(lw, op, qs[k], std::nullopt, prior);
    st.analytic = t.total();
    st.q_norm = qs[k].norm();
    if (k == 0) report.closed_form_terms = t;
    stats.push_back(st);
  }
  report.closed_form = stats[0];
  report.zero = stats[1];
  report.random.assign(stats.begin() + 2, stats.end());
  report.closed_form_is_min = std::all_of(stats.begin() + 1, stats.end(), [&](const FidelityStat& s) {
    return report.closed_form.analytic <= s.analytic * (1.0 + 1e-12) + 1e-12;
  });
  return report;
}

}  // namespace steer::toygen
