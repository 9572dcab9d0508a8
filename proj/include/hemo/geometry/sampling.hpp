#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "hemo/geometry/lattice_domain.hpp"

namespace hemo::geometry {

/// Wall location at which the traction is monitored.
struct WallSamplePoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();     // m
  Eigen::Vector3d unit_normal = Eigen::Vector3d::UnitX(); // fluid -> solid
  std::size_t site = 0;  // grid index of the nearest wall-adjacent fluid site
};

/// Resolves a wall sample point. `position` must lie within one dx of the
/// midpoint of a cut wall link. The normal comes from the domain's surface
/// when available, otherwise from the cut-link directions of the site.
WallSamplePoint wall_normal(const LatticeDomain& domain, const Eigen::Vector3d& position);

/// Midpoint of the cut wall link closest to `position`, searching within
/// `max_distance` (m). Empty when no cut wall link is that close.
std::optional<Eigen::Vector3d> nearest_wall_link(const LatticeDomain& domain,
                                                 const Eigen::Vector3d& position,
                                                 double max_distance);

/// Normal estimated from the wall links of a site: normalise(sum w_k c_k over cut k).
Eigen::Vector3d link_normal(const LatticeDomain& domain, std::size_t site);

/// Number of face-connected fluid components.
std::size_t fluid_components(const LatticeDomain& domain);

/// True when every fluid site is face-connected to an inlet-adjacent site.
bool reachable_from_inlets(const LatticeDomain& domain);

/// Marks fluid sites that are not face-connected to an inlet as solid and
/// recomputes classes. Returns the number of sites removed.
std::size_t remove_unreachable(LatticeDomain& domain);

/// Euler characteristic of the union of closed fluid voxels (non-periodic axes only).
std::int64_t euler_characteristic(const LatticeDomain& domain);

/// Little-endian voxel dump; layout documented in docs/file_formats.md.
void write_domain(const std::filesystem::path& path, const LatticeDomain& domain);
LatticeDomain read_domain(const std::filesystem::path& path);

}  // namespace hemo::geometry
