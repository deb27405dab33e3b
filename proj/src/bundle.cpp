#include "steerlab/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "steerlab/error.hpp"
#include "steerlab/io_util.hpp"
#include "steerlab/zip.hpp"

namespace steer {
namespace {

using json = nlohmann::json;

std::string level_key(int index, const char* field) {
  return "level" + std::to_string(index) + "." + field;
}

// Position of the first non-finite value in column-major storage, or -1.
template <typename Derived>
Eigen::Index first_nonfinite(const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) return j * m.rows() + i;
    }
  }
  return -1;
}

}  // namespace

int flat_index(const Dims& dims, int channel, int row, int col) {
  if (channel < 0 || channel >= dims.channels || row < 0 || row >= dims.height || col < 0 ||
      col >= dims.width) {
    throw DataError("tensor index out of range");
  }
  return (channel * dims.height + row) * dims.width + col;
}

TensorIndex unflatten(const Dims& dims, int index) {
  if (index < 0 || index >= dims.size()) throw DataError("flat index out of range");
  const int plane = dims.spatial();
  return {index / plane, (index % plane) / dims.width, index % dims.width};
}

const LevelWeights& WeightBundle::level(int index) const {
  if (index < 1 || index > level_count()) {
    throw UsageError("level " + std::to_string(index) + " out of range 1.." +
                     std::to_string(level_count()));
  }
  return levels[static_cast<std::size_t>(index - 1)];
}

ChunkRange WeightBundle::chunk(int index) const {
  if (index < 1 || index > static_cast<int>(chunk_ranges.size())) {
    throw UsageError("no chunk range for level " + std::to_string(index));
  }
  return chunk_ranges[static_cast<std::size_t>(index - 1)];
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const ValidationReport::Check* ValidationReport::first_failure() const {
  for (const Check& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_json() const {
  json j;
  j["ok"] = ok();
  j["checks"] = json::array();
  for (const Check& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return j.dump(2);
}

ValidationReport validate_bundle(const WeightBundle& bundle) {
  ValidationReport report;
  auto check = [&](std::string name, bool passed, std::string detail = {}) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  check("levels.count", bundle.level_count() >= 1,
        std::to_string(bundle.level_count()) + " level(s)");
  check("latent_dim.positive", bundle.latent_dim > 0, std::to_string(bundle.latent_dim));

  for (int i = 1; i <= bundle.level_count(); ++i) {
    const LevelWeights& lw = bundle.levels[static_cast<std::size_t>(i - 1)];
    const Dims& d = lw.dims;
    const std::string prefix = "level" + std::to_string(i);
    const bool dims_ok = d.channels > 0 && d.height > 0 && d.width > 0;
    check(prefix + ".dims", dims_ok,
          std::to_string(d.channels) + "x" + std::to_string(d.height) + "x" +
              std::to_string(d.width));
    if (i == 1) {
      check("level1.spatial", dims_ok && d.spatial() > 1,
            "first level must produce a spatial tensor");
    }
    check(level_key(i, "W") + ".rows", dims_ok && lw.W.rows() == d.size(),
          "rows " + std::to_string(lw.W.rows()) + " vs C*H*W " + std::to_string(d.size()));
    check(level_key(i, "b") + ".length", lw.b.size() == lw.W.rows(),
          "length " + std::to_string(lw.b.size()) + " vs rows " + std::to_string(lw.W.rows()));
    check(level_key(i, "W") + ".cols", lw.W.cols() > 0, std::to_string(lw.W.cols()));

    const Eigen::Index badW = first_nonfinite(lw.W);
    if (badW < 0) {
      check(level_key(i, "W") + ".finite", true);
    } else {
      const Eigen::Index r = badW % lw.W.rows();
      const Eigen::Index c = badW / lw.W.rows();
      check(level_key(i, "W") + ".finite", false,
            "non-finite entry at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
    }
    const Eigen::Index badb = first_nonfinite(lw.b);
    check(level_key(i, "b") + ".finite", badb < 0,
          badb < 0 ? "" : "non-finite entry at " + std::to_string(badb));

    if (static_cast<std::size_t>(i) <= bundle.chunk_ranges.size()) {
      const ChunkRange cr = bundle.chunk_ranges[static_cast<std::size_t>(i - 1)];
      check(prefix + ".chunk_width",
            cr.end >= cr.start && static_cast<Eigen::Index>(cr.width()) == lw.W.cols(),
            "chunk [" + std::to_string(cr.start) + "," + std::to_string(cr.end) + ") vs W cols " +
                std::to_string(lw.W.cols()));
    }
  }

  check("chunk_ranges.count",
        bundle.chunk_ranges.size() == static_cast<std::size_t>(bundle.level_count()),
        std::to_string(bundle.chunk_ranges.size()) + " range(s) for " +
            std::to_string(bundle.level_count()) + " level(s)");

  bool nonempty = true;
  std::string empty_detail;
  for (std::size_t k = 0; k < bundle.chunk_ranges.size(); ++k) {
    const ChunkRange cr = bundle.chunk_ranges[k];
    if (cr.end <= cr.start) {
      nonempty = false;
      empty_detail = "range " + std::to_string(k + 1) + " is empty";
      break;
    }
  }
  check("chunk_ranges.nonempty", nonempty, empty_detail);

  bool disjoint = true;
  std::string overlap_detail;
  for (std::size_t k = 1; k < bundle.chunk_ranges.size(); ++k) {
    const ChunkRange prev = bundle.chunk_ranges[k - 1];
    const ChunkRange cur = bundle.chunk_ranges[k];
    if (cur.start < prev.end) {
      disjoint = false;
      overlap_detail = "[" + std::to_string(prev.start) + "," + std::to_string(prev.end) +
                       ") overlaps or precedes [" + std::to_string(cur.start) + "," +
                       std::to_string(cur.end) + ")";
      break;
    }
  }
  check("chunk_ranges.sorted_disjoint", disjoint, overlap_detail);

  const bool within = std::all_of(bundle.chunk_ranges.begin(), bundle.chunk_ranges.end(),
                                  [&](const ChunkRange& cr) { return cr.end <= bundle.latent_dim; });
  check("chunk_ranges.within_latent", within, "latent_dim " + std::to_string(bundle.latent_dim));
  return report;
}

std::string serialize_bundle(const WeightBundle& bundle) {
  json meta;
  meta["format_version"] = 1;
  meta["latent_dim"] = bundle.latent_dim;
  meta["dtype"] = bundle.dtype == npy::Dtype::f64 ? "float64" : "float32";
  meta["chunk_ranges"] = json::array();
  for (const ChunkRange& cr : bundle.chunk_ranges) meta["chunk_ranges"].push_back({cr.start, cr.end});
  meta["dims"] = json::array();
  for (const LevelWeights& lw : bundle.levels) {
    meta["dims"].push_back({lw.dims.channels, lw.dims.height, lw.dims.width});
  }

  std::vector<zip::Entry> entries;
  entries.push_back({"meta.json", meta.dump(2) + "\n"});
  for (int i = 1; i <= bundle.level_count(); ++i) {
    const LevelWeights& lw = bundle.levels[static_cast<std::size_t>(i - 1)];
    entries.push_back({level_key(i, "W") + ".npy",
                       npy::serialize(npy::from_matrix(lw.W, bundle.dtype))});
    entries.push_back({level_key(i, "b") + ".npy",
                       npy::serialize(npy::from_vector(lw.b, bundle.dtype))});
  }
  return zip::write(entries);
}

WeightBundle parse_bundle_unvalidated(const std::string& bytes, const std::string& what) {
  std::map<std::string, std::string> members;
  for (zip::Entry& e : zip::read(bytes, what)) {
    std::string key = e.name;
    if (key.size() > 4 && key.ends_with(".npy")) key.resize(key.size() - 4);
    members[key] = std::move(e.data);
  }

  auto meta_it = members.find("meta.json");
  if (meta_it == members.end()) throw DataError(what + ": missing key meta.json");
  json meta;
  try {
    meta = json::parse(meta_it->second);
  } catch (const json::exception& ex) {
    throw DataError(what + ": meta.json is not valid JSON (" + ex.what() + ")");
  }

  WeightBundle bundle;
  try {
    if (!meta.contains("latent_dim")) throw DataError(what + ": meta.json missing key latent_dim");
    if (!meta.contains("dims")) throw DataError(what + ": meta.json missing key dims");
    if (!meta.contains("chunk_ranges")) {
      throw DataError(what + ": meta.json missing key chunk_ranges");
    }
    bundle.latent_dim = meta.at("latent_dim").get<std::size_t>();
    for (const json& cr : meta.at("chunk_ranges")) {
      if (!cr.is_array() || cr.size() != 2) {
        throw DataError(what + ": chunk_ranges entries must be [start, end]");
      }
      bundle.chunk_ranges.push_back({cr[0].get<std::size_t>(), cr[1].get<std::size_t>()});
    }
    const json& dims = meta.at("dims");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const json& d = dims[i];
      if (!d.is_array() || d.size() != 3) {
        throw DataError(what + ": dims[" + std::to_string(i) + "] must be [C, H, W]");
      }
      LevelWeights lw;
      lw.dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
      bundle.levels.push_back(std::move(lw));
    }
  } catch (const json::exception& ex) {
    throw DataError(what + ": bad meta.json (" + ex.what() + ")");
  }

  // Float32 is kept only when every array is float32; mixed containers upcast exactly.
  bool all_f32 = true;
  for (int i = 1; i <= bundle.level_count(); ++i) {
    LevelWeights& lw = bundle.levels[static_cast<std::size_t>(i - 1)];
    for (const char* field : {"W", "b"}) {
      const std::string key = level_key(i, field);
      auto it = members.find(key);
      if (it == members.end()) throw DataError(what + ": missing key " + key);
      npy::Array arr = npy::parse(it->second, key);
      all_f32 = all_f32 && arr.dtype == npy::Dtype::f32;
      if (field[0] == 'W') {
        lw.W = npy::to_matrix(arr, key);
      } else {
        lw.b = npy::to_vector(arr, key);
      }
    }
  }
  bundle.dtype = all_f32 && bundle.level_count() > 0 ? npy::Dtype::f32 : npy::Dtype::f64;
  return bundle;
}

WeightBundle parse_bundle(const std::string& bytes, const std::string& what) {
  WeightBundle bundle = parse_bundle_unvalidated(bytes, what);
  const ValidationReport report = validate_bundle(bundle);
  if (const auto* bad = report.first_failure()) {
    throw DataError(what + ": " + bad->name + ": " + bad->detail);
  }
  return bundle;
}

WeightBundle load_bundle(const std::filesystem::path& path) {
  return parse_bundle(io::read_file(path), path.string());
}

void save_bundle(const WeightBundle& bundle, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_bundle(bundle));
}

WeightBundle synthetic_bundle(const std::vector<Dims>& level_dims,
                              const std::vector<int>& chunk_widths, std::uint64_t seed) {
  if (level_dims.size() != chunk_widths.size() || level_dims.empty()) {
    throw UsageError("synthetic_bundle: need one chunk width per level");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightBundle bundle;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < level_dims.size(); ++i) {
    const int d = chunk_widths[i];
    LevelWeights lw;
    lw.dims = level_dims[i];
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    lw.W = Eigen::MatrixXd::NullaryExpr(lw.dims.size(), d, [&] { return scale * normal(rng); });
    lw.b = Eigen::VectorXd::NullaryExpr(lw.dims.size(), [&] { return normal(rng); });
    bundle.levels.push_back(std::move(lw));
    bundle.chunk_ranges.push_back({offset, offset + static_cast<std::size_t>(d)});
    offset += static_cast<std::size_t>(d);
  }
  bundle.latent_dim = offset;
  return bundle;
}

std::vector<Dims> biggan128_level_dims() {
  // Level 1: the 4x4x1536 first dense layer. Levels 2-6: gain/bias maps of
  // the conditional batch norms in blocks with 1536, 1536, 768, 384, 192 input
  // channels (two norms per block, gain and bias each).
  return {{1536, 4, 4}, {1536 * 4, 1, 1}, {1536 * 4, 1, 1},
          {768 * 4, 1, 1}, {384 * 4, 1, 1}, {192 * 4, 1, 1}};
}

}  // namespace steer
