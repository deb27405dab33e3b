#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace steer::npy {

enum class Dtype { f32, f64 };

/// A dense C-order array as stored in an NPY file. Values are held as
/// float64 regardless of the on-disk element type; `dtype` remembers what to
/// write back so float32 files round-trip exactly.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  Dtype dtype = Dtype::f64;

  std::size_t size() const;
};

/// Parse an NPY v1.0/v2.0 byte stream (little-endian f4/f8, C order).
/// Throws DataError naming `what` on any format problem.
Array parse(const std::string& bytes, const std::string& what = "array");

/// Serialize as NPY v1.0 with a 64-byte aligned header.
std::string serialize(const Array& array);

Array load(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const Array& array);

// Eigen conversions. Matrices map row-major on disk onto column-major Eigen.
Array from_matrix(const Eigen::MatrixXd& m, Dtype dtype = Dtype::f64);
Array from_vector(const Eigen::VectorXd& v, Dtype dtype = Dtype::f64);
Eigen::MatrixXd to_matrix(const Array& array, const std::string& what = "array");
Eigen::VectorXd to_vector(const Array& array, const std::string& what = "array");

}  // namespace steer::npy
