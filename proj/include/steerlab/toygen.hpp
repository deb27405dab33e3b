#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"
#include "steerlab/closed_form.hpp"
#include "steerlab/operators.hpp"

namespace steer::toygen {

enum class Padding { circular, zero };
Padding parse_padding(std::string_view name);

/// Small seeded generator: dense layer to a (channels, 4, 4) tensor, then
/// `stages` blocks of nearest-neighbour 2x upsampling + k x k convolution.
/// Leaky ramp (slope 0.2) after every block but the last.
struct ToyGenSpec {
  int latent_width = 8;
  int channels = 16;
  int stages = 2;
  int kernel = 3;
  Padding padding = Padding::circular;
  int out_channels = 1;
  std::uint64_t seed = 0;

  static constexpr int kGrid = 4;
  int output_side() const { return kGrid << stages; }
  Dims first_layer_dims() const { return {channels, kGrid, kGrid}; }
};

/// Channel-major (C, H, W) tensor.
struct Tensor3 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int c, int h, int w) : channels(c), height(h), width(w), data(std::size_t(c) * h * w) {}

  double& at(int c, int r, int col) { return data[(std::size_t(c) * height + r) * width + col]; }
  double at(int c, int r, int col) const {
    return data[(std::size_t(c) * height + r) * width + col];
  }
};

struct ConvStage {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  std::vector<double> weights;  // (out, in, k, k)
  std::vector<double> bias;     // out

  double w(int co, int ci, int ky, int kx) const {
    return weights[((std::size_t(co) * in_channels + ci) * kernel + ky) * kernel + kx];
  }
};

class ToyGenerator {
 public:
  ToyGenerator(ToyGenSpec spec, LevelWeights first, std::vector<ConvStage> stages);

  const ToyGenSpec& spec() const { return spec_; }
  const LevelWeights& first_layer() const { return first_; }
  const std::vector<ConvStage>& stages() const { return stages_; }

  /// Single-level bundle holding the first layer; latent_dim = latent_width.
  WeightBundle export_bundle() const;

  /// convstack(reshape(W z + b)).
  Tensor3 forward(const Eigen::VectorXd& z) const;
  std::vector<Tensor3> forward(const std::vector<Eigen::VectorXd>& batch) const;

  /// The conv stack applied to an arbitrary flattened first-layer tensor.
  Tensor3 synthesize(const Eigen::VectorXd& first_layer_output) const;

 private:
  ToyGenSpec spec_;
  LevelWeights first_;
  std::vector<ConvStage> stages_;
};

/// Deterministic: standard-normal draws from a seeded stream, each weight
/// scaled by 1/sqrt(fan-in); the first-layer bias is left unscaled.
ToyGenerator build_toy_generator(const ToyGenSpec& spec);

/// convstack(P (W z + b)): the image the transformed first-layer tensor yields.
Tensor3 apply_operator_at_first_layer(const ToyGenerator& gen, const Eigen::VectorXd& z,
                                      const OperatorSpec& op);

/// Cyclic pixel roll: out(r, c) = in(r - dy, c - dx) modulo the grid.
Tensor3 roll(const Tensor3& image, int dx, int dy);

/// Binary PGM (1 channel) or PPM (3 channels), values mapped affinely from
/// [min, max] onto [0, 255].
std::string encode_pnm(const Tensor3& image);
void write_pnm(const Tensor3& image, const std::filesystem::path& path);

struct FidelityStat {
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;  // term1 + term2
  double q_norm = 0.0;
};

struct FidelityReport {
  FidelityStat closed_form;
  FidelityStat zero;
  std::vector<FidelityStat> random;
  ObjectiveTerms closed_form_terms;
  bool closed_form_is_min = false;  // by the analytic values
  int samples = 0;

  std::string to_json() const;
};

/// Empirical E||D(W(z + q) + b - P(W z + b))||^2 for the closed-form q, for
/// q = 0 and for ten random q of the same norm, next to the analytic values.
FidelityReport steering_fidelity_report(const ToyGenerator& gen, const OperatorSpec& op,
                                        int n_samples, const LatentPrior& prior = LatentPrior{},
                                        std::uint64_t seed = 0);

}  // namespace steer::toygen
