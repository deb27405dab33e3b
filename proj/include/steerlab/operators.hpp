#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "steerlab/bundle.hpp"

namespace steer {

enum class OperatorKind { shift_x, shift_y, zoom_in, zoom_out, rot90, identity, custom };
enum class Boundary { zero_fill, cyclic };
enum class ZoomDirection { in, out };

std::string_view to_string(OperatorKind kind);
OperatorKind parse_operator_kind(std::string_view name);
Boundary parse_boundary(std::string_view name);

/// Linear map on the flattened first-level tensor, P = I_C (x) P_spatial, with
/// the 0/1 penalty mask D (D_ii = 0 exactly where row i of P is all zero).
/// Only the spatial factor is stored; the full matrix is materialised on demand.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::identity;
  Dims dims;
  Eigen::MatrixXd spatial;       // (H*W) x (H*W); (P x)_i = sum_j P_ij x_j
  Eigen::VectorXd spatial_mask;  // H*W entries, each 0 or 1
  Boundary boundary = Boundary::zero_fill;
  int offset = 0;         // shifts: signed element count
  int factor = 1;         // zoom: 2
  int quarter_turns = 0;  // rot90

  Eigen::Index size() const { return dims.size(); }

  /// Full-length diagonal of D.
  Eigen::VectorXd mask() const;
  /// Dense (C*H*W)^2 matrix. Only sensible for small tensors.
  Eigen::MatrixXd materialize() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Applies P to every column of X.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// Translation by `offset` elements along one axis. Output cell (r, c) reads
/// input (r, c - offset) for shift-x and (r - offset, c) for shift-y. With
/// zero fill, cells whose source falls outside the grid are unsourced.
OperatorSpec make_shift(const Dims& dims, char axis, int offset, Boundary boundary);

/// zoom-in: nearest-neighbour 2x upsampling of the central H/2 x W/2 block,
///   output(i, j) = input(H/4 + i/2, W/4 + j/2).
/// zoom-out: stride-2 subsampling placed in the central block,
///   output(H/4 + i, W/4 + j) = input(2i, 2j); the surrounding ring is masked.
OperatorSpec make_zoom(const Dims& dims, ZoomDirection direction);

/// Clockwise rotation by `quarter_turns` * 90 degrees on a square grid.
OperatorSpec make_rot90(const Dims& dims, int quarter_turns);

OperatorSpec make_identity(const Dims& dims);

/// Lift a spatial matrix of side H*W to the full operator; D from the zero-row rule.
OperatorSpec operator_from_spatial(const Eigen::MatrixXd& spatial, const Dims& dims,
                                   OperatorKind kind = OperatorKind::custom);

/// Custom operator file: one NPY array of shape (H*W, H*W).
OperatorSpec load_custom_operator(const std::filesystem::path& path, const Dims& dims);

/// D_ii = 0 iff row i of P is entirely zero, else 1.
Eigen::VectorXd derive_mask(const Eigen::MatrixXd& P);

}  // namespace steer
