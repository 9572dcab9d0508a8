#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hemo/lattice/velocity_set.hpp"

namespace hemo::geometry {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SiteClass : std::uint8_t {
  Solid = 0,
  Fluid = 1,
  Wall = 2,    // fluid with at least one link cut by the vessel wall
  Inlet = 3,   // fluid with at least one link crossing an inlet cap
  Outlet = 4,  // fluid with at least one link crossing an outlet cap
};

enum class BoundaryKind : std::uint8_t { Inlet = 0, Outlet = 1 };

inline bool is_fluid(SiteClass c) { return c != SiteClass::Solid; }

/// Planar inlet or outlet cap.
struct BoundaryPlane {
  BoundaryKind kind = BoundaryKind::Inlet;
  int index = 0;                                     // inlet i / outlet j
  Eigen::Vector3d inward_normal = Eigen::Vector3d::UnitX();  // points into the fluid
  Eigen::Vector3d point = Eigen::Vector3d::Zero();   // on the plane, near the cap centre
  double radius = 0.0;                               // cap extent, m

  std::string name() const {
    return std::string(kind == BoundaryKind::Inlet ? "inlet" : "outlet") + std::to_string(index);
  }
};

/// Continuous wall description that can answer normal queries.
class Surface {
 public:
  virtual ~Surface() = default;
  /// Unit normal pointing from the fluid into the solid near `p`.
  virtual Eigen::Vector3d outward_normal(const Eigen::Vector3d& p) const = 0;
};

/// Regular-grid voxel classification plus geometric metadata.
///
/// Grid site (i, j, k) sits at origin + dx * (i, j, k). Linear index is
/// (i * ny + j) * nz + k, so fluid sites enumerated in grid order form x-slabs.
class LatticeDomain {
 public:
  LatticeDomain() = default;
  LatticeDomain(Eigen::Vector3i dims, double dx, Eigen::Vector3d origin,
                std::array<bool, 3> periodic = {false, false, false});

  const Eigen::Vector3i& dims() const { return dims_; }
  double dx() const { return dx_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  const std::array<bool, 3>& periodic() const { return periodic_; }
  std::size_t site_count() const { return site_class_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
  }
  Eigen::Vector3i coords(std::size_t idx) const;
  Eigen::Vector3d position(std::size_t idx) const;
  Eigen::Vector3d position(const Eigen::Vector3i& c) const {
    return origin_ + dx_ * c.cast<double>();
  }

  /// Grid index of the neighbour along direction k, honouring periodic axes.
  std::optional<std::size_t> neighbor(std::size_t idx, int k) const;

  SiteClass site_class(std::size_t idx) const { return site_class_[idx]; }
  void set_site_class(std::size_t idx, SiteClass c) { site_class_[idx] = c; }

  lattice::DirectionMask wall_cuts(std::size_t idx) const { return wall_cuts_[idx]; }
  lattice::DirectionMask iolet_cuts(std::size_t idx) const { return iolet_cuts_[idx]; }
  /// Index into boundaries() for iolet-adjacent sites, -1 otherwise.
  int iolet_id(std::size_t idx) const { return iolet_id_[idx]; }

  void set_links(std::size_t idx, lattice::DirectionMask wall, lattice::DirectionMask iolets,
                 int iolet) {
    wall_cuts_[idx] = wall;
    iolet_cuts_[idx] = iolets;
    iolet_id_[idx] = static_cast<std::int8_t>(iolet);
  }

  const std::vector<BoundaryPlane>& boundaries() const { return boundaries_; }
  std::vector<BoundaryPlane>& boundaries() { return boundaries_; }
  int inlet_count() const;
  int outlet_count() const;
  /// Position of boundary (kind, index) in boundaries(), or -1.
  int find_boundary(BoundaryKind kind, int index) const;

  const std::shared_ptr<const Surface>& surface() const { return surface_; }
  void set_surface(std::shared_ptr<const Surface> s) { surface_ = std::move(s); }

  std::size_t fluid_count() const;
  std::size_t count(SiteClass c) const;

  /// Recompute Wall/Inlet/Outlet/Fluid classes from the link masks.
  void reclassify_from_links();

  /// Checks link-consistency invariants; returns a description of the first violation.
  std::optional<std::string> check_links() const;

 private:
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
  double dx_ = 0.0;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  std::array<bool, 3> periodic_{false, false, false};
  std::vector<SiteClass> site_class_;
  std::vector<lattice::DirectionMask> wall_cuts_;
  std::vector<lattice::DirectionMask> iolet_cuts_;
  std::vector<std::int8_t> iolet_id_;
  std::vector<BoundaryPlane> boundaries_;
  std::shared_ptr<const Surface> surface_;
};

}  // namespace hemo::geometry
