#include <doctest.h>

#include "steerlab/error.hpp"
#include "steerlab/transfer.hpp"

using namespace steer;

namespace {

WeightBundle chunked(std::size_t latent_dim, int count) {
  WeightBundle b;
  b.latent_dim = latent_dim;
  b.chunk_ranges = equal_chunks(latent_dim, count);
  return b;
}

}  // namespace

TEST_CASE("presets") {
  CHECK(preset_schedule("pose").levels == std::set<int>{1});
  CHECK(preset_schedule("color").levels == std::set<int>{4, 5, 6});
  CHECK(preset_schedule("texture").levels == std::set<int>{3, 4, 5});
  CHECK_THROWS_AS(preset_schedule("style"), UsageError);
}

TEST_CASE("frozen: pose swap on a 12-dim, 6-chunk latent") {
  const Eigen::VectorXd src = Eigen::VectorXd::LinSpaced(12, 0, 11);
  const Eigen::VectorXd tgt = -Eigen::VectorXd::LinSpaced(12, 1, 12);
  const WeightBundle b = chunked(12, 6);
  const Eigen::VectorXd pose = swap_chunks(src, tgt, preset_schedule("pose"), b);
  Eigen::VectorXd expected = src;
  expected.head(2) = tgt.head(2);
  CHECK(pose == expected);
  const Eigen::VectorXd color = swap_chunks(src, tgt, preset_schedule("color"), b);
  CHECK(color.head(6) == src.head(6));
  CHECK(color.tail(6) == tgt.tail(6));
}

TEST_CASE("uneven chunk ranges and an unpartitioned tail") {
  WeightBundle b;
  b.latent_dim = 10;
  b.chunk_ranges = {{0, 3}, {3, 4}, {6, 9}};
  const Eigen::VectorXd src = Eigen::VectorXd::Zero(10);
  const Eigen::VectorXd tgt = Eigen::VectorXd::Ones(10);
  const Eigen::VectorXd out = swap_chunks(src, tgt, custom_schedule({2, 3}), b);
  CHECK(out == (Eigen::VectorXd(10) << 0, 0, 0, 1, 0, 0, 1, 1, 1, 0).finished());
}

TEST_CASE("class labels follow the source unless swapped") {
  const WeightBundle b = chunked(6, 3);
  const LatentCode src{Eigen::VectorXd::Zero(6), 207};
  const LatentCode tgt{Eigen::VectorXd::Ones(6), 1};
  CHECK(swap_codes(src, tgt, custom_schedule({1}), b).class_label == 207);
  CHECK(swap_codes(src, tgt, custom_schedule({1}), b, true).class_label == 1);
  CHECK_FALSE(swap_codes({src.z, std::nullopt}, tgt, custom_schedule({1}), b).class_label.has_value());
}

TEST_CASE("guards") {
  const WeightBundle b = chunked(6, 3);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
  CHECK_THROWS_AS(swap_chunks(z, z, custom_schedule({}), b), UsageError);
  CHECK_THROWS_AS(swap_chunks(z, z, custom_schedule({4}), b), UsageError);
  CHECK_THROWS_AS(swap_chunks(z, z, custom_schedule({0}), b), UsageError);
  CHECK_THROWS_AS(swap_chunks(z, Eigen::VectorXd::Zero(5), custom_schedule({1}), b), DataError);
  CHECK_THROWS_AS(equal_chunks(10, 3), UsageError);
  CHECK_THROWS_AS(equal_chunks(10, 0), UsageError);
  CHECK(equal_chunks(120, 6)[5] == ChunkRange{100, 120});
}
