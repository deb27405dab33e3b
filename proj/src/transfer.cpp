#include "steerlab/transfer.hpp"

#include "steerlab/error.hpp"

namespace steer {

TransferSchedule preset_schedule(std::string_view name) {
  if (name == "pose") return {"pose", {1}};
  if (name == "color") return {"color", {4, 5, 6}};
  if (name == "texture") return {"texture", {3, 4, 5}};
  throw UsageError("unknown transfer preset '" + std::string(name) +
                   "' (pose, color, texture)");
}

TransferSchedule custom_schedule(std::set<int> levels) {
  return {"custom", std::move(levels)};
}

Eigen::VectorXd swap_chunks(const Eigen::VectorXd& z_src, const Eigen::VectorXd& z_tgt,
                            const TransferSchedule& schedule,
                            const std::vector<ChunkRange>& chunk_ranges, std::size_t latent_dim) {
  const auto n = static_cast<Eigen::Index>(latent_dim);
  if (z_src.size() != n || z_tgt.size() != n) {
    throw DataError("transfer: latents have lengths " + std::to_string(z_src.size()) + " and " +
                    std::to_string(z_tgt.size()) + ", expected " + std::to_string(latent_dim));
  }
  if (schedule.levels.empty()) throw UsageError("transfer schedule '" + schedule.name + "' is empty");
  for (int level : schedule.levels) {
    if (level < 1 || level > static_cast<int>(chunk_ranges.size())) {
      throw UsageError("schedule '" + schedule.name + "' names level " + std::to_string(level) +
                       " but only " + std::to_string(chunk_ranges.size()) + " exist");
    }
  }
  Eigen::VectorXd out = z_src;
  for (int level : schedule.levels) {
    const ChunkRange r = chunk_ranges[static_cast<std::size_t>(level - 1)];
    if (r.end > latent_dim) throw DataError("chunk range exceeds latent length");
    const auto start = static_cast<Eigen::Index>(r.start);
    const auto width = static_cast<Eigen::Index>(r.width());
    out.segment(start, width) = z_tgt.segment(start, width);
  }
  return out;
}

Eigen::VectorXd swap_chunks(const Eigen::VectorXd& z_src, const Eigen::VectorXd& z_tgt,
                            const TransferSchedule& schedule, const WeightBundle& bundle) {
  return swap_chunks(z_src, z_tgt, schedule, bundle.chunk_ranges, bundle.latent_dim);
}

LatentCode swap_codes(const LatentCode& src, const LatentCode& tgt,
                      const TransferSchedule& schedule, const WeightBundle& bundle,
                      bool swap_class) {
  LatentCode out;
  out.z = swap_chunks(src.z, tgt.z, schedule, bundle);
  out.class_label = swap_class ? tgt.class_label : src.class_label;
  return out;
}

std::vector<ChunkRange> equal_chunks(std::size_t latent_dim, int count) {
  if (count < 1 || latent_dim % static_cast<std::size_t>(count) != 0) {
    throw UsageError("cannot split a latent of length " + std::to_string(latent_dim) + " into " +
                     std::to_string(count) + " equal chunks");
  }
  const std::size_t width = latent_dim / static_cast<std::size_t>(count);
  std::vector<ChunkRange> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({i * width, (i + 1) * width});
  }
  return out;
}

}  // namespace steer
