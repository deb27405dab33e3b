#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <cstring>
#include <random>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "steerlab/bundle.hpp"
#include "steerlab/error.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/npy.hpp"
#include "steerlab/zip.hpp"

using namespace steer;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("steerlab_test_" + name);
}

WeightBundle small_bundle(std::uint64_t seed = 3) {
  return synthetic_bundle({{4, 2, 2}, {8, 1, 1}}, {5, 3}, seed);
}

}  // namespace

TEST_CASE("flat index is channel-major then row-major and invertible") {
  const Dims d{3, 4, 5};
  CHECK(flat_index(d, 0, 0, 0) == 0);
  CHECK(flat_index(d, 0, 0, 1) == 1);
  CHECK(flat_index(d, 0, 1, 0) == 5);
  CHECK(flat_index(d, 1, 0, 0) == 20);
  CHECK(flat_index(d, 2, 3, 4) == 59);
  for (int i = 0; i < d.size(); ++i) {
    const TensorIndex t = unflatten(d, i);
    CHECK(flat_index(d, t.channel, t.row, t.col) == i);
  }
}

TEST_CASE("NPY header is v1.0, 64-byte aligned, and round-trips") {
  const Eigen::MatrixXd m = (Eigen::MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6).finished();
  const std::string bytes = npy::serialize(npy::from_matrix(m));
  CHECK(bytes.substr(0, 6) == "\x93NUMPY");
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 0);
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
  CHECK((10 + header_len) % 64 == 0);
  CHECK(bytes.find("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }") != std::string::npos);
  CHECK(bytes[10 + header_len - 1] == '\n');
  // Row-major payload.
  double second;
  std::memcpy(&second, bytes.data() + 10 + header_len + 8, 8);
  CHECK(second == 2.0);

  const npy::Array back = npy::parse(bytes);
  CHECK(npy::to_matrix(back) == m);
  CHECK(npy::serialize(back) == bytes);
}

TEST_CASE("NPY 1-D shape tuple and float32") {
  const Eigen::VectorXd v = (Eigen::VectorXd(3) << 0.5, -1.25, 3.0).finished();
  const std::string bytes = npy::serialize(npy::from_vector(v, npy::Dtype::f32));
  CHECK(bytes.find("'descr': '<f4'") != std::string::npos);
  CHECK(bytes.find("'shape': (3,)") != std::string::npos);
  const npy::Array a = npy::parse(bytes);
  CHECK(a.dtype == npy::Dtype::f32);
  CHECK(npy::to_vector(a) == v);
  CHECK(npy::serialize(a) == bytes);
}

TEST_CASE("NPY rejects what it cannot read") {
  std::string bytes = npy::serialize(npy::from_vector(Eigen::VectorXd::Ones(2)));
  SUBCASE("fortran order") {
    const auto pos = bytes.find("False");
    bytes.replace(pos, 5, "True ");
    CHECK_THROWS_AS(npy::parse(bytes), DataError);
  }
  SUBCASE("dtype") {
    bytes.replace(bytes.find("<f8"), 3, "<i8");
    CHECK_THROWS_AS(npy::parse(bytes), DataError);
  }
  SUBCASE("truncated payload") { CHECK_THROWS_AS(npy::parse(bytes.substr(0, bytes.size() - 1)), DataError); }
  SUBCASE("magic") { CHECK_THROWS_AS(npy::parse("not an npy file"), DataError); }
}

TEST_CASE("zip write/read round trip, CRC checked") {
  std::vector<zip::Entry> entries{{"a.txt", "hello"}, {"dir/b.bin", std::string("\0\1\2\3", 4)}, {"empty", ""}};
  const std::string archive = zip::write(entries);
  CHECK(zip::write(entries) == archive);
  const auto back = zip::read(archive, "t");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].name == entries[i].name);
    CHECK(back[i].data == entries[i].data);
  }
  std::string corrupt = archive;
  corrupt[30 + 5] ^= 0x20;  // first byte of "hello" (local header is 30 bytes + name)
  CHECK_THROWS_AS(zip::read(corrupt, "t"), DataError);
  CHECK_THROWS_AS(zip::read("garbage", "t"), DataError);
}

TEST_CASE("bundle save/load is bit-exact and byte-identical") {
  const WeightBundle b = small_bundle();
  const auto path = temp_path("bundle.zip");
  save_bundle(b, path);
  const WeightBundle back = load_bundle(path);
  REQUIRE(back.level_count() == 2);
  for (int i = 1; i <= 2; ++i) {
    CHECK(back.level(i).W == b.level(i).W);
    CHECK(back.level(i).b == b.level(i).b);
    CHECK(back.level(i).dims == b.level(i).dims);
  }
  CHECK(back.chunk_ranges == b.chunk_ranges);
  CHECK(back.latent_dim == b.latent_dim);
  const std::string bytes = io::read_file(path);
  CHECK(serialize_bundle(load_bundle(path)) == bytes);
  std::filesystem::remove(path);
}

TEST_CASE("float32 bundles stay float32 through a round trip") {
  WeightBundle b = small_bundle();
  b.dtype = npy::Dtype::f32;
  for (auto& lw : b.levels) {
    lw.W = lw.W.cast<float>().cast<double>();
    lw.b = lw.b.cast<float>().cast<double>();
  }
  const std::string bytes = serialize_bundle(b);
  const WeightBundle back = parse_bundle(bytes);
  CHECK(back.dtype == npy::Dtype::f32);
  CHECK(serialize_bundle(back) == bytes);
  CHECK(back.level(1).W == b.level(1).W);
}

TEST_CASE("validation reports name the failing key") {
  WeightBundle b = small_bundle();
  CHECK(validate_bundle(b).ok());

  SUBCASE("b length mismatch") {
    b.levels[0].b.conservativeResize(b.levels[0].b.size() - 1);
    const auto* bad = validate_bundle(b).first_failure();
    REQUIRE(bad != nullptr);
    CHECK(bad->name == "level1.b.length");
  }
  SUBCASE("NaN in W names the entry") {
    b.levels[1].W(2, 1) = std::numeric_limits<double>::quiet_NaN();
    const auto* bad = validate_bundle(b).first_failure();
    REQUIRE(bad != nullptr);
    CHECK(bad->name == "level2.W.finite");
    CHECK(bad->detail.find("(2, 1)") != std::string::npos);
  }
  SUBCASE("overlapping chunk ranges") {
    b.latent_dim = 40;
    b.levels[0].W = Eigen::MatrixXd::Ones(16, 20);
    b.levels[1].W = Eigen::MatrixXd::Ones(8, 25);
    b.chunk_ranges = {{0, 20}, {15, 40}};
    const auto rep = validate_bundle(b);
    const auto* bad = rep.first_failure();
    REQUIRE(bad != nullptr);
    CHECK(bad->name == "chunk_ranges.sorted_disjoint");
    CHECK(rep.to_json().find("sorted_disjoint") != std::string::npos);
  }
  SUBCASE("level 1 must be spatial") {
    b.levels[0].dims = {16, 1, 1};
    const auto* bad = validate_bundle(b).first_failure();
    REQUIRE(bad != nullptr);
    CHECK(bad->name == "level1.spatial");
  }
}

TEST_CASE("parse errors carry the key name") {
  const WeightBundle b = small_bundle();
  auto entries = zip::read(serialize_bundle(b), "t");
  SUBCASE("missing array") {
    entries.erase(entries.begin() + 2);  // level1.b.npy
    try {
      parse_bundle(zip::write(entries), "m.zip");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("level1.b") != std::string::npos);
      CHECK(e.code() == 2);
    }
  }
  SUBCASE("missing meta key") {
    entries[0].data = "{\"dims\": [], \"chunk_ranges\": []}";
    try {
      parse_bundle(zip::write(entries), "m.zip");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("latent_dim") != std::string::npos);
    }
  }
  SUBCASE("shape mismatch with declared dims") {
    auto meta = nlohmann::json::parse(entries[0].data);
    meta["dims"][0] = {4, 2, 3};
    entries[0].data = meta.dump();
    CHECK_THROWS_AS(parse_bundle(zip::write(entries), "m.zip"), DataError);
  }
}

TEST_CASE("synthetic BigGAN-128 level dims") {
  const auto dims = biggan128_level_dims();
  REQUIRE(dims.size() == 6);
  CHECK(dims[0] == Dims{1536, 4, 4});
  CHECK(dims[0].size() == 24576);
  const WeightBundle b = synthetic_bundle(dims, {20, 20, 20, 20, 20, 20}, 0);
  CHECK(b.latent_dim == 120);
  CHECK(b.chunk(6) == ChunkRange{100, 120});
  CHECK(validate_bundle(b).ok());
  CHECK(synthetic_bundle(dims, {20, 20, 20, 20, 20, 20}, 0).level(3).W == b.level(3).W);
}

TEST_CASE("atomic write leaves no temp files behind") {
  const auto dir = temp_path("atomic");
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "x.bin", "abc");
  io::write_file_atomic(dir / "x.bin", "defg");
  CHECK(io::read_file(dir / "x.bin") == "defg");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  CHECK_THROWS_AS(io::read_file(dir / "missing"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mixed float32/float64 containers upcast without loss") {
  WeightBundle b = small_bundle();
  auto entries = zip::read(serialize_bundle(b), "t");
  const Eigen::VectorXd b32 = b.level(1).b.cast<float>().cast<double>();
  entries[2].data = npy::serialize(npy::from_vector(b32, npy::Dtype::f32));  // level1.b.npy
  const WeightBundle back = parse_bundle(zip::write(entries));
  CHECK(back.dtype == npy::Dtype::f64);
  CHECK(back.level(1).W == b.level(1).W);
  CHECK(back.level(1).b == b32);
  CHECK(parse_bundle(serialize_bundle(back)).level(1).W == b.level(1).W);
}

TEST_CASE("unvalidated parse defers invariant checks") {
  WeightBundle b = small_bundle();
  b.levels[0].b.conservativeResize(3);
  const std::string bytes = serialize_bundle(b);
  CHECK_THROWS_AS(parse_bundle(bytes), DataError);
  const WeightBundle raw = parse_bundle_unvalidated(bytes);
  CHECK_FALSE(validate_bundle(raw).ok());
}
