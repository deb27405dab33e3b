#include "steerlab/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "steerlab/error.hpp"
#include "steerlab/io_util.hpp"

namespace steer::npy {
namespace {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

constexpr char kMagic[] = "\x93NUMPY";

std::string shape_tuple(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

// Value text following `'key':` in the header dict.
std::string header_value(const std::string& header, const std::string& key,
                         const std::string& what) {
  const std::string needle = "'" + key + "'";
  auto pos = header.find(needle);
  if (pos == std::string::npos) throw DataError(what + ": NPY header lacks '" + key + "'");
  pos = header.find(':', pos + needle.size());
  if (pos == std::string::npos) throw DataError(what + ": malformed NPY header");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) throw DataError(what + ": malformed NPY shape");
    ++end;
  } else if (header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw DataError(what + ": malformed NPY header");
    ++end;
  } else {
    while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  }
  return header.substr(pos, end - pos);
}

std::vector<std::size_t> parse_shape(const std::string& tuple, const std::string& what) {
  std::vector<std::size_t> shape;
  std::string inner = tuple.substr(1, tuple.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto first = item.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(item.substr(first), &used);
      shape.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw DataError(what + ": bad NPY shape entry '" + item + "'");
    }
  }
  return shape;
}

}  // namespace

std::size_t Array::size() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Array parse(const std::string& bytes, const std::string& what) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0) {
    throw DataError(what + ": not an NPY stream");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw DataError(what + ": truncated NPY header");
    std::uint32_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 4);
    header_len = len;
    offset = 12;
  } else {
    throw DataError(what + ": unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) throw DataError(what + ": truncated NPY header");
  const std::string header = bytes.substr(offset, header_len);
  offset += header_len;

  Array out;
  const std::string descr = header_value(header, "descr", what);
  std::size_t item = 0;
  if (descr == "'<f8'") {
    out.dtype = Dtype::f64;
    item = 8;
  } else if (descr == "'<f4'") {
    out.dtype = Dtype::f32;
    item = 4;
  } else {
    throw DataError(what + ": unsupported dtype " + descr + " (need <f8 or <f4)");
  }
  if (header_value(header, "fortran_order", what) != "False") {
    throw DataError(what + ": Fortran-ordered arrays are not supported");
  }
  out.shape = parse_shape(header_value(header, "shape", what), what);

  const std::size_t n = out.size();
  if (bytes.size() - offset != n * item) {
    throw DataError(what + ": payload holds " + std::to_string(bytes.size() - offset) +
                    " bytes, shape needs " + std::to_string(n * item));
  }
  out.data.resize(n);
  if (out.dtype == Dtype::f64) {
    std::memcpy(out.data.data(), bytes.data() + offset, n * 8);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, bytes.data() + offset + i * 4, 4);
      out.data[i] = f;
    }
  }
  return out;
}

std::string serialize(const Array& array) {
  if (array.size() != array.data.size()) {
    throw DataError("NPY serialize: shape does not match element count");
  }
  std::string header = "{'descr': '";
  header += array.dtype == Dtype::f64 ? "<f8" : "<f4";
  header += "', 'fortran_order': False, 'shape': " + shape_tuple(array.shape) + ", }";
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::string out(kMagic, 6);
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(header.size() & 0xff);
  out += static_cast<char>((header.size() >> 8) & 0xff);
  out += header;
  const std::size_t n = array.data.size();
  if (array.dtype == Dtype::f64) {
    out.append(reinterpret_cast<const char*>(array.data.data()), n * 8);
  } else {
    for (double v : array.data) {
      const float f = static_cast<float>(v);
      out.append(reinterpret_cast<const char*>(&f), 4);
    }
  }
  return out;
}

Array load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

void save(const std::filesystem::path& path, const Array& array) {
  io::write_file_atomic(path, serialize(array));
}

Array from_matrix(const Eigen::MatrixXd& m, Dtype dtype) {
  Array a;
  a.dtype = dtype;
  a.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
  a.data.resize(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a.data.data(), m.rows(), m.cols()) = m;
  return a;
}

Array from_vector(const Eigen::VectorXd& v, Dtype dtype) {
  Array a;
  a.dtype = dtype;
  a.shape = {static_cast<std::size_t>(v.size())};
  a.data.assign(v.data(), v.data() + v.size());
  return a;
}

Eigen::MatrixXd to_matrix(const Array& array, const std::string& what) {
  if (array.shape.size() != 2) {
    throw DataError(what + ": expected a 2-D array, got " + std::to_string(array.shape.size()) +
                    "-D");
  }
  const auto rows = static_cast<Eigen::Index>(array.shape[0]);
  const auto cols = static_cast<Eigen::Index>(array.shape[1]);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      array.data.data(), rows, cols);
}

Eigen::VectorXd to_vector(const Array& array, const std::string& what) {
  if (array.shape.size() != 1) {
    throw DataError(what + ": expected a 1-D array, got " + std::to_string(array.shape.size()) +
                    "-D");
  }
  return Eigen::Map<const Eigen::VectorXd>(array.data.data(),
                                           static_cast<Eigen::Index>(array.data.size()));
}

}  // namespace steer::npy
