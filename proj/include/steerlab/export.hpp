#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "steerlab/closed_form.hpp"
#include "steerlab/principal.hpp"
#include "steerlab/walks.hpp"

namespace steer {

/// Sidecar JSON path for an exported array: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// q as a 1-D NPY plus sidecar {level, provenance, alpha, residual, rank}.
void write_direction(const std::filesystem::path& path, const SteeringDirection& direction,
                     std::optional<double> residual = std::nullopt,
                     std::optional<int> rank = std::nullopt);
std::string direction_json(const SteeringDirection& direction, std::optional<double> residual,
                           std::optional<int> rank);

Eigen::VectorXd read_vector(const std::filesystem::path& path);

/// Points as a (steps x latent_dim) NPY plus sidecar {kind, level, delta,
/// theta, radius, endpoint, ...}. `extra` is merged into the sidecar object.
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory,
                      const std::string& extra_json = "{}");
std::string trajectory_json(const Trajectory& trajectory, const std::string& extra_json = "{}");

/// <prefix>.V.npy, <prefix>.sigma.npy and <prefix>.json. The sidecar
/// timestamp comes from SOURCE_DATE_EPOCH when set, else the wall clock.
void write_basis(const std::filesystem::path& prefix, const PrincipalBasis& basis);
std::string basis_json(const PrincipalBasis& basis);

}  // namespace steer
