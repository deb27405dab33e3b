#include "steerlab/export.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include <nlohmann/json.hpp>

#include "steerlab/error.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/npy.hpp"

namespace steer {
namespace {

using json = nlohmann::json;

std::string iso8601(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::time_t output_time() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return static_cast<std::time_t>(std::stoll(epoch));
    } catch (const std::exception&) {
      throw UsageError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

std::string direction_json(const SteeringDirection& d, std::optional<double> residual,
                           std::optional<int> rank) {
  json j;
  j["level"] = d.level;
  j["provenance"] = d.provenance.describe();
  j["alpha"] = d.alpha;
  j["residual"] = residual ? json(*residual) : json(nullptr);
  if (rank) j["rank"] = *rank;
  j["length"] = d.q.size();
  return j.dump(2) + "\n";
}

void write_direction(const std::filesystem::path& path, const SteeringDirection& direction,
                     std::optional<double> residual, std::optional<int> rank) {
  npy::save(path, npy::from_vector(direction.q));
  io::write_file_atomic(sidecar_path(path), direction_json(direction, residual, rank));
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  const npy::Array arr = npy::load(path);
  if (arr.shape.size() == 2 && (arr.shape[0] == 1 || arr.shape[1] == 1)) {
    return Eigen::Map<const Eigen::VectorXd>(arr.data.data(),
                                             static_cast<Eigen::Index>(arr.data.size()));
  }
  return npy::to_vector(arr, path.string());
}

std::string trajectory_json(const Trajectory& t, const std::string& extra_json) {
  json j;
  j["kind"] = std::string(to_string(t.kind));
  j["level"] = t.chunk.level;
  j["chunk"] = {t.chunk.range.start, t.chunk.range.end};
  j["steps"] = t.points.size();
  j["first_index"] = t.steps.empty() ? 0 : t.steps.front().index;
  j["delta"] = t.delta;
  j["theta"] = t.theta;
  j["radius"] = t.radius;
  j["cumulative"] = json::array();
  for (const StepInfo& s : t.steps) j["cumulative"].push_back(s.cumulative);
  j["endpoint"] = t.endpoint ? vector_json(*t.endpoint) : json(nullptr);
  const json extra = json::parse(extra_json);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory,
                      const std::string& extra_json) {
  npy::save(path, npy::from_matrix(trajectory.as_matrix()));
  io::write_file_atomic(sidecar_path(path), trajectory_json(trajectory, extra_json));
}

std::string basis_json(const PrincipalBasis& basis) {
  json j;
  j["level"] = basis.level;
  j["count"] = basis.V.cols();
  j["dimension"] = basis.V.rows();
  j["sign_convention"] = "largest-magnitude entry of each column is positive";
  j["null_directions"] = json::array();
  for (std::size_t k = 0; k < basis.null_direction.size(); ++k) {
    if (basis.null_direction[k]) j["null_directions"].push_back(k + 1);
  }
  j["timestamp"] = iso8601(output_time());
  return j.dump(2) + "\n";
}

void write_basis(const std::filesystem::path& prefix, const PrincipalBasis& basis) {
  std::filesystem::path v = prefix, s = prefix, meta = prefix;
  v += ".V.npy";
  s += ".sigma.npy";
  meta += ".json";
  npy::save(v, npy::from_matrix(basis.V));
  npy::save(s, npy::from_vector(basis.sigmas));
  io::write_file_atomic(meta, basis_json(basis));
}

}  // namespace steer
