#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hemo/geometry/lattice_domain.hpp"

namespace hemo::geometry {

/// Cap identity attached to a triangle label.
struct CapId {
  BoundaryKind kind = BoundaryKind::Inlet;
  int index = 0;
  bool operator==(const CapId&) const = default;
};

/// Closed, outward-oriented triangle surface. cap_labels[t] is -1 for wall
/// triangles, otherwise an index into `caps`.
struct SurfaceMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> cap_labels;
  std::vector<CapId> caps;

  std::size_t triangle_count() const { return triangles.size(); }
  Eigen::Vector3d vertex(int t, int c) const { return vertices[triangles[t][c]]; }
  /// Area-weighted (unnormalised, length = 2 * area) normal.
  Eigen::Vector3d area_normal(int t) const;
  double signed_volume() const;
  double area() const;
};

/// One line of the cap sidecar: "inlet|outlet <index> plane: nx ny nz d tolerance",
/// selecting every triangle whose vertices all satisfy |n.x - d| <= tolerance.
struct CapPlane {
  CapId id;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitX();
  double d = 0.0;
  double tolerance = 0.0;
};

/// Reads binary or ASCII STL, welding coincident vertices. Coordinates are
/// multiplied by `scale` (e.g. 1e-3 for millimetre files).
SurfaceMesh read_stl(const std::filesystem::path& path, double scale = 1.0);
void write_stl_binary(const std::filesystem::path& path, const SurfaceMesh& mesh);
void write_stl_ascii(const std::filesystem::path& path, const SurfaceMesh& mesh);

std::vector<CapPlane> parse_cap_sidecar(const std::string& text);
std::vector<CapPlane> read_cap_sidecar(const std::filesystem::path& path);
std::string format_cap_sidecar(const std::vector<CapPlane>& planes);

/// Labels triangles from sidecar planes. Throws if a plane selects nothing.
void apply_cap_labels(SurfaceMesh& mesh, const std::vector<CapPlane>& planes);

/// Closed and consistently oriented with outward normals, no degenerate
/// triangles, every cap a single edge-connected patch. Returns the first
/// problem found.
std::optional<std::string> validate_mesh(const SurfaceMesh& mesh);

/// Cap planes derived from labelled triangles (inward normal, area centroid, radius).
std::vector<BoundaryPlane> cap_boundaries(const SurfaceMesh& mesh);

SurfaceMesh make_box_mesh(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);
SurfaceMesh make_sphere_mesh(const Eigen::Vector3d& centre, double radius, int subdivisions);
/// Closed cylinder from `a` to `b`; the cap at `a` is labelled inlet 0, the
/// cap at `b` outlet 0.
SurfaceMesh make_cylinder_mesh(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius,
                               int segments);

}  // namespace hemo::geometry
