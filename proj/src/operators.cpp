#include "steerlab/operators.hpp"

#include "steerlab/error.hpp"

namespace steer {
namespace {

std::string dims_text(const Dims& d) {
  return std::to_string(d.channels) + "x" + std::to_string(d.height) + "x" +
         std::to_string(d.width);
}

void require_valid(const Dims& dims) {
  if (dims.channels <= 0 || dims.height <= 0 || dims.width <= 0) {
    throw UsageError("operator dims must be positive, got " + dims_text(dims));
  }
}

int mod(int a, int n) { return ((a % n) + n) % n; }

OperatorSpec blank(const Dims& dims, OperatorKind kind) {
  require_valid(dims);
  OperatorSpec op;
  op.kind = kind;
  op.dims = dims;
  op.spatial = Eigen::MatrixXd::Zero(dims.spatial(), dims.spatial());
  return op;
}

}  // namespace

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::shift_x: return "shift-x";
    case OperatorKind::shift_y: return "shift-y";
    case OperatorKind::zoom_in: return "zoom-in";
    case OperatorKind::zoom_out: return "zoom-out";
    case OperatorKind::rot90: return "rot90";
    case OperatorKind::identity: return "identity";
    case OperatorKind::custom: return "custom";
  }
  return "custom";
}

OperatorKind parse_operator_kind(std::string_view name) {
  for (OperatorKind k : {OperatorKind::shift_x, OperatorKind::shift_y, OperatorKind::zoom_in,
                         OperatorKind::zoom_out, OperatorKind::rot90, OperatorKind::identity,
                         OperatorKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown operator '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "zero" || name == "zero-fill") return Boundary::zero_fill;
  if (name == "cyclic") return Boundary::cyclic;
  throw UsageError("unknown boundary '" + std::string(name) + "' (zero-fill or cyclic)");
}

Eigen::VectorXd OperatorSpec::mask() const {
  return spatial_mask.replicate(dims.channels, 1);
}

Eigen::MatrixXd OperatorSpec::materialize() const {
  const Eigen::Index n = dims.spatial();
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(size(), size());
  for (int c = 0; c < dims.channels; ++c) full.block(c * n, c * n, n, n) = spatial;
  return full;
}

Eigen::VectorXd OperatorSpec::apply(const Eigen::VectorXd& x) const {
  if (x.size() != size()) {
    throw DataError("operator of size " + std::to_string(size()) + " applied to vector of length " +
                    std::to_string(x.size()));
  }
  const Eigen::Index n = dims.spatial();
  Eigen::VectorXd y(x.size());
  Eigen::Map<Eigen::MatrixXd>(y.data(), n, dims.channels) =
      spatial * Eigen::Map<const Eigen::MatrixXd>(x.data(), n, dims.channels);
  return y;
}

Eigen::MatrixXd OperatorSpec::apply(const Eigen::MatrixXd& X) const {
  if (X.rows() != size()) {
    throw DataError("operator of size " + std::to_string(size()) + " applied to matrix with " +
                    std::to_string(X.rows()) + " rows");
  }
  const Eigen::Index n = dims.spatial();
  Eigen::MatrixXd Y(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::Map<Eigen::MatrixXd>(Y.col(j).data(), n, dims.channels) =
        spatial * Eigen::Map<const Eigen::MatrixXd>(X.col(j).data(), n, dims.channels);
  }
  return Y;
}

OperatorSpec make_shift(const Dims& dims, char axis, int offset, Boundary boundary) {
  if (axis != 'x' && axis != 'y') throw UsageError("shift axis must be x or y");
  OperatorSpec op = blank(dims, axis == 'x' ? OperatorKind::shift_x : OperatorKind::shift_y);
  const int side = axis == 'x' ? dims.width : dims.height;
  if (offset <= -side || offset >= side) {
    throw UsageError("shift offset " + std::to_string(offset) + " out of range for grid side " +
                     std::to_string(side));
  }
  op.offset = offset;
  op.boundary = boundary;
  for (int r = 0; r < dims.height; ++r) {
    for (int c = 0; c < dims.width; ++c) {
      int sr = axis == 'y' ? r - offset : r;
      int sc = axis == 'x' ? c - offset : c;
      if (boundary == Boundary::cyclic) {
        sr = mod(sr, dims.height);
        sc = mod(sc, dims.width);
      } else if (sr < 0 || sr >= dims.height || sc < 0 || sc >= dims.width) {
        continue;
      }
      op.spatial(r * dims.width + c, sr * dims.width + sc) = 1.0;
    }
  }
  op.spatial_mask = derive_mask(op.spatial);
  return op;
}

OperatorSpec make_zoom(const Dims& dims, ZoomDirection direction) {
  if (dims.height % 2 != 0 || dims.width % 2 != 0) {
    throw UsageError("zoom needs an even grid, got " + dims_text(dims));
  }
  OperatorSpec op =
      blank(dims, direction == ZoomDirection::in ? OperatorKind::zoom_in : OperatorKind::zoom_out);
  op.factor = 2;
  const int top = dims.height / 4;
  const int left = dims.width / 4;
  if (direction == ZoomDirection::in) {
    for (int i = 0; i < dims.height; ++i) {
      for (int j = 0; j < dims.width; ++j) {
        op.spatial(i * dims.width + j, (top + i / 2) * dims.width + (left + j / 2)) = 1.0;
      }
    }
  } else {
    for (int i = 0; i < dims.height / 2; ++i) {
      for (int j = 0; j < dims.width / 2; ++j) {
        op.spatial((top + i) * dims.width + (left + j), (2 * i) * dims.width + 2 * j) = 1.0;
      }
    }
  }
  op.spatial_mask = derive_mask(op.spatial);
  return op;
}

OperatorSpec make_rot90(const Dims& dims, int quarter_turns) {
  if (dims.height != dims.width) {
    throw UsageError("rot90 needs a square grid, got " + dims_text(dims));
  }
  OperatorSpec op = blank(dims, OperatorKind::rot90);
  op.quarter_turns = quarter_turns;
  const int n = dims.width;
  const int k = mod(quarter_turns, 4);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // Undo k clockwise turns to find where output (r, c) came from.
      int sr = r;
      int sc = c;
      for (int t = 0; t < k; ++t) {
        const int pr = n - 1 - sc;
        sc = sr;
        sr = pr;
      }
      op.spatial(r * n + c, sr * n + sc) = 1.0;
    }
  }
  op.spatial_mask = derive_mask(op.spatial);
  return op;
}

OperatorSpec make_identity(const Dims& dims) {
  OperatorSpec op = blank(dims, OperatorKind::identity);
  op.spatial.setIdentity();
  op.spatial_mask = Eigen::VectorXd::Ones(dims.spatial());
  return op;
}

OperatorSpec operator_from_spatial(const Eigen::MatrixXd& spatial, const Dims& dims,
                                   OperatorKind kind) {
  require_valid(dims);
  if (spatial.rows() != dims.spatial() || spatial.cols() != dims.spatial()) {
    throw DataError("custom operator must be " + std::to_string(dims.spatial()) + "x" +
                    std::to_string(dims.spatial()) + " for grid " + dims_text(dims) + ", got " +
                    std::to_string(spatial.rows()) + "x" + std::to_string(spatial.cols()));
  }
  if (!spatial.allFinite()) throw DataError("custom operator has non-finite entries");
  OperatorSpec op;
  op.kind = kind;
  op.dims = dims;
  op.spatial = spatial;
  op.spatial_mask = derive_mask(spatial);
  return op;
}

OperatorSpec load_custom_operator(const std::filesystem::path& path, const Dims& dims) {
  const npy::Array arr = npy::load(path);
  return operator_from_spatial(npy::to_matrix(arr, path.string()), dims);
}

Eigen::VectorXd derive_mask(const Eigen::MatrixXd& P) {
  Eigen::VectorXd d(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    d(i) = P.row(i).cwiseAbs().sum() == 0.0 ? 0.0 : 1.0;
  }
  return d;
}

}  // namespace steer
