#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hemo/geometry/lattice_domain.hpp"

namespace hemo::geometry {

/// Analytic vessel described by a signed distance-like function (negative
/// inside) plus planar caps.
class ImplicitShape : public Surface {
 public:
  virtual double distance(const Eigen::Vector3d& p) const = 0;
  /// Axis-aligned bounds of the fluid region.
  virtual std::pair<Eigen::Vector3d, Eigen::Vector3d> bounds() const = 0;
  virtual double length_scale() const = 0;

  /// Normalised gradient of distance(), pointing from fluid into solid.
  Eigen::Vector3d outward_normal(const Eigen::Vector3d& p) const override;

  const std::vector<BoundaryPlane>& caps() const { return caps_; }

 protected:
  std::vector<BoundaryPlane> caps_;
};

/// Plane channel: fluid for 0 < x < length, 0 < y < height; z unbounded
/// (the generated domain is periodic in z over `depth`). Inlet at x = 0,
/// outlet at x = length.
class ChannelShape : public ImplicitShape {
 public:
  ChannelShape(double length, double height, double depth);
  double distance(const Eigen::Vector3d& p) const override;
  std::pair<Eigen::Vector3d, Eigen::Vector3d> bounds() const override;
  double length_scale() const override { return height_; }

 private:
  double length_, height_, depth_;
};

/// One straight vessel segment. Each end is either a flat cap or a
/// hemispherical (rounded) end.
struct Segment {
  Eigen::Vector3d start;
  Eigen::Vector3d end;
  double radius;
  bool rounded_start = false;
  bool rounded_end = false;

  double distance(const Eigen::Vector3d& p) const;
};

/// Union of segments joined with a polynomial smooth minimum of width `blend`.
class VesselTreeShape : public ImplicitShape {
 public:
  VesselTreeShape(std::vector<Segment> segments, double blend);
  double distance(const Eigen::Vector3d& p) const override;
  std::pair<Eigen::Vector3d, Eigen::Vector3d> bounds() const override;
  double length_scale() const override;
  const std::vector<Segment>& segments() const { return segments_; }
  void add_cap(BoundaryPlane cap) { caps_.push_back(std::move(cap)); }

 private:
  std::vector<Segment> segments_;
  double blend_;
};

struct BifurcationSpec {
  double parent_radius = 1.25e-3;
  double parent_length = 7.5e-3;
  std::array<double, 2> daughter_radii{0.85e-3, 0.62e-3};
  std::array<double, 2> daughter_lengths{7.5e-3, 7.5e-3};
  double angle = 1.2217304763960306;  // total angle between daughters, rad (70 deg)
  double blend = 0.3;                 // fillet width as a fraction of the smallest radius
};

/// Straight cylinder along +x from the origin; inlet at x = 0, outlet at x = length.
std::shared_ptr<VesselTreeShape> make_cylinder_shape(double length, double radius);

/// Parent along +x from the origin to the junction, daughter 0 towards +y and
/// daughter 1 towards -y in the z = 0 plane, each at angle/2 from the parent axis.
/// Inlet 0 at the parent start, outlet j at the end of daughter j.
std::shared_ptr<VesselTreeShape> make_bifurcation_shape(const BifurcationSpec& spec);

/// Samples an implicit shape on a grid whose sites sit at half-integer
/// multiples of dx from the shape's coordinate origin.
LatticeDomain voxelize_shape(std::shared_ptr<const ImplicitShape> shape, double dx,
                             std::array<bool, 3> periodic = {false, false, false},
                             int margin = 2);

LatticeDomain generate_channel(double length, double height, double depth, double dx);
LatticeDomain generate_cylinder(double length, double radius, double dx);
LatticeDomain generate_bifurcation(const BifurcationSpec& spec, double dx);

}  // namespace hemo::geometry
