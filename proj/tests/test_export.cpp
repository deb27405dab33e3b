#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "steerlab/export.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/npy.hpp"

using namespace steer;
using nlohmann::json;

namespace {

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "steerlab_test_export";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("direction NPY + sidecar") {
  SteeringDirection d;
  d.q = Eigen::Vector3d(1, -2, 0.5);
  d.level = 3;
  d.provenance.op = OperatorKind::zoom_out;
  const auto path = scratch() / "q.npy";
  write_direction(path, d, 1e-17, 3);
  CHECK(read_vector(path) == d.q);
  const json j = json::parse(io::read_file(sidecar_path(path)));
  CHECK(j["level"] == 3);
  CHECK(j["rank"] == 3);
  CHECK(j["length"] == 3);
  CHECK(j["provenance"].get<std::string>().find("zoom-out") != std::string::npos);

  SteeringDirection p = d;
  p.provenance.source = Provenance::Source::principal;
  p.provenance.principal_index = 2;
  const json jp = json::parse(direction_json(p, std::nullopt, std::nullopt));
  CHECK(jp["residual"].is_null());
  CHECK(jp["provenance"].get<std::string>().find('2') != std::string::npos);
}

TEST_CASE("trajectory NPY + sidecar") {
  const Eigen::VectorXd z0 = Eigen::VectorXd::LinSpaced(6, 1, 6);
  const Trajectory t = great_circle(z0, {2, {2, 5}}, Eigen::Vector3d(0, 0, 1), 0.2, {-1, 4});
  const auto path = scratch() / "t.npy";
  write_trajectory(path, t, R"({"seed": 5})");
  const npy::Array a = npy::load(path);
  CHECK(a.shape == std::vector<std::size_t>{5, 6});
  CHECK(npy::to_matrix(a) == t.as_matrix());
  const json j = json::parse(io::read_file(sidecar_path(path)));
  CHECK(j["kind"] == "great-circle");
  CHECK(j["level"] == 2);
  CHECK(j["chunk"] == json::array({2, 5}));
  CHECK(j["steps"] == 5);
  CHECK(j["first_index"] == -1);
  CHECK(j["delta"] == 0.2);
  CHECK(j["theta"] == t.theta);
  CHECK(j["endpoint"].size() == 6);
  CHECK(j["seed"] == 5);
}

TEST_CASE("basis files and a pinned timestamp are deterministic") {
  PrincipalBasis b;
  b.V = Eigen::Matrix2d::Identity();
  b.sigmas = Eigen::Vector2d(2, 0);
  b.level = 1;
  b.null_direction = {false, true};
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  const auto prefix = scratch() / "basis";
  write_basis(prefix, b);
  const std::string first = io::read_file(prefix.string() + ".json");
  write_basis(prefix, b);
  CHECK(io::read_file(prefix.string() + ".json") == first);
  const json j = json::parse(first);
  CHECK(j["timestamp"] == "1970-01-02T00:00:00Z");
  CHECK(j["null_directions"] == json::array({2}));
  CHECK(npy::to_vector(npy::load(prefix.string() + ".sigma.npy")) == b.sigmas);
  unsetenv("SOURCE_DATE_EPOCH");
}
