#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hemo/geometry/lattice_domain.hpp"
#include "hemo/geometry/mesh.hpp"

namespace hemo::geometry {

struct VoxelizeOptions {
  int margin = 2;  // solid layers around the mesh bounding box
  /// Grid anchor; sites sit at anchor + dx * integer. Defaults to the mesh
  /// bounding-box minimum.
  std::optional<Eigen::Vector3d> anchor;
  /// Drop fluid sites not face-connected to an inlet (when inlets exist).
  bool remove_unreachable = true;
};

/// Uniform-grid bucket index over the triangles of a mesh.
class TriangleIndex {
 public:
  TriangleIndex(const SurfaceMesh& mesh, double cell);

  /// Triangles whose bounding box overlaps the box [lo, hi].
  std::vector<int> query(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) const;
  const SurfaceMesh& mesh() const { return *mesh_; }

 private:
  Eigen::Vector3i cell_of(const Eigen::Vector3d& p) const;

  const SurfaceMesh* mesh_;
  double cell_;
  Eigen::Vector3d lo_;
  Eigen::Vector3i dims_;
  std::vector<std::vector<int>> buckets_;
};

/// Surface normals from nearby mesh facets.
class MeshSurface : public Surface {
 public:
  MeshSurface(SurfaceMesh mesh, double radius);
  Eigen::Vector3d outward_normal(const Eigen::Vector3d& p) const override;
  const SurfaceMesh& mesh() const { return mesh_; }

 private:
  SurfaceMesh mesh_;
  double radius_;
  std::unique_ptr<TriangleIndex> index_;
};

/// Classifies grid sites against a closed, oriented, labelled surface mesh.
///
/// A site is fluid iff its centre is inside the surface (ray parity along +x;
/// hits exactly on a facet or edge are resolved by a half-open rule so every
/// ray crosses a watertight surface a consistent number of times). Links from
/// fluid sites into solid are cut; a link whose first crossing is a cap
/// triangle is flagged as that inlet/outlet.
LatticeDomain voxelize(const SurfaceMesh& mesh, double dx, const VoxelizeOptions& options = {});

/// Inside test used by voxelize(), exposed for oracles and diagnostics.
bool point_inside(const SurfaceMesh& mesh, const Eigen::Vector3d& p);

}  // namespace hemo::geometry
