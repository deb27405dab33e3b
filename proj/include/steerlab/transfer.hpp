#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"

namespace steer {

/// Which hierarchy levels (1-based) to copy from the target code.
struct TransferSchedule {
  std::string name = "custom";
  std::set<int> levels;
};

/// pose -> {1}, color -> {4, 5, 6}, texture -> {3, 4, 5}.
TransferSchedule preset_schedule(std::string_view name);
TransferSchedule custom_schedule(std::set<int> levels);

/// A full latent vector plus the opaque class label a class-conditional
/// generator would consume alongside it.
struct LatentCode {
  Eigen::VectorXd z;
  std::optional<int> class_label;
};

/// z_src with the chunks of every scheduled level taken from z_tgt.
Eigen::VectorXd swap_chunks(const Eigen::VectorXd& z_src, const Eigen::VectorXd& z_tgt,
                            const TransferSchedule& schedule,
                            const std::vector<ChunkRange>& chunk_ranges, std::size_t latent_dim);

Eigen::VectorXd swap_chunks(const Eigen::VectorXd& z_src, const Eigen::VectorXd& z_tgt,
                            const TransferSchedule& schedule, const WeightBundle& bundle);

/// As swap_chunks; the class label comes from the target when `swap_class`.
LatentCode swap_codes(const LatentCode& src, const LatentCode& tgt,
                      const TransferSchedule& schedule, const WeightBundle& bundle,
                      bool swap_class = false);

/// Equal contiguous chunks covering 0..latent_dim (used when no bundle is given).
std::vector<ChunkRange> equal_chunks(std::size_t latent_dim, int count);

}  // namespace steer
