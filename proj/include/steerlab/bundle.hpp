#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steerlab/npy.hpp"

namespace steer {

/// Shape of one level's output tensor. Flattening is channel-major, then
/// row-major over the spatial grid: index = c*H*W + r*W + col.
struct Dims {
  int channels = 0;
  int height = 0;
  int width = 0;

  int spatial() const { return height * width; }
  int size() const { return channels * height * width; }
  bool operator==(const Dims&) const = default;
};

struct TensorIndex {
  int channel;
  int row;
  int col;
  bool operator==(const TensorIndex&) const = default;
};

int flat_index(const Dims& dims, int channel, int row, int col);
TensorIndex unflatten(const Dims& dims, int index);

/// Half-open interval [start, end) of the full latent vector.
struct ChunkRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t width() const { return end - start; }
  bool operator==(const ChunkRange&) const = default;
};

/// First dense layer of one hierarchy level: output = W z_chunk + b.
struct LevelWeights {
  Eigen::MatrixXd W;  // (C*H*W_sp) x d_level
  Eigen::VectorXd b;  // C*H*W_sp
  Dims dims;

  Eigen::Index latent_width() const { return W.cols(); }
};

/// Per-level first-layer weights plus the latent partition. Levels are
/// addressed 1-based. Treat as read-only once loaded; every solver takes it
/// by const reference.
struct WeightBundle {
  std::vector<LevelWeights> levels;
  std::size_t latent_dim = 0;
  std::vector<ChunkRange> chunk_ranges;
  npy::Dtype dtype = npy::Dtype::f64;  // element type written by save_bundle

  int level_count() const { return static_cast<int>(levels.size()); }
  const LevelWeights& level(int index) const;
  ChunkRange chunk(int index) const;
};

struct ValidationReport {
  struct Check {
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Check> checks;

  bool ok() const;
  const Check* first_failure() const;
  std::string to_json() const;
};

/// Runs every structural invariant and reports each one; never throws.
ValidationReport validate_bundle(const WeightBundle& bundle);

/// Serialized container bytes: stored zip with meta.json, then level{i}.W and
/// level{i}.b for each level in order.
std::string serialize_bundle(const WeightBundle& bundle);
WeightBundle parse_bundle(const std::string& bytes, const std::string& what = "bundle");
/// As parse_bundle but structural invariants are left to validate_bundle.
WeightBundle parse_bundle_unvalidated(const std::string& bytes, const std::string& what = "bundle");

WeightBundle load_bundle(const std::filesystem::path& path);
void save_bundle(const WeightBundle& bundle, const std::filesystem::path& path);

/// Standard-normal weights scaled by 1/sqrt(d), chunks laid out contiguously
/// from 0 in level order.
WeightBundle synthetic_bundle(const std::vector<Dims>& level_dims,
                              const std::vector<int>& chunk_widths, std::uint64_t seed);

/// Level output shapes of a BigGAN-128-sized generator with 6 latent chunks of
/// 20: a 4x4x1536 first level, then per-block conditional normalisation gains.
std::vector<Dims> biggan128_level_dims();

}  // namespace steer
