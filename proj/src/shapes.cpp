#include "hemo/geometry/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hemo/geometry/sampling.hpp"

namespace hemo::geometry {

using lattice::kDirections;
using lattice::kQ;

Eigen::Vector3d ImplicitShape::outward_normal(const Eigen::Vector3d& p) const {
  const double h = 1e-6 * length_scale();
  Eigen::Vector3d g;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[a] = h;
    g[a] = distance(p + e) - distance(p - e);
  }
  if (!(g.norm() > 0.0)) throw GeometryError("implicit shape: zero gradient at query point");
  return g.normalized();
}

ChannelShape::ChannelShape(double length, double height, double depth)
    : length_(length), height_(height), depth_(depth) {
  BoundaryPlane in;
  in.kind = BoundaryKind::Inlet;
  in.index = 0;
  in.inward_normal = Eigen::Vector3d::UnitX();
  in.point = Eigen::Vector3d(0.0, 0.5 * height, 0.5 * depth);
  in.radius = std::max(height, depth);
  BoundaryPlane out = in;
  out.kind = BoundaryKind::Outlet;
  out.inward_normal = -Eigen::Vector3d::UnitX();
  out.point.x() = length;
  caps_ = {in, out};
}

double ChannelShape::distance(const Eigen::Vector3d& p) const {
  return std::max({-p.x(), p.x() - length_, -p.y(), p.y() - height_});
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> ChannelShape::bounds() const {
  return {Eigen::Vector3d::Zero(), Eigen::Vector3d(length_, height_, depth_)};
}

double Segment::distance(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d axis = end - start;
  const double len = axis.norm();
  const Eigen::Vector3d d = axis / len;
  const double t = (p - start).dot(d);
  if (t < 0.0 && rounded_start) return (p - start).norm() - radius;
  if (t > len && rounded_end) return (p - end).norm() - radius;
  double dist = (p - start - t * d).norm() - radius;
  if (!rounded_start) dist = std::max(dist, -t);
  if (!rounded_end) dist = std::max(dist, t - len);
  return dist;
}

VesselTreeShape::VesselTreeShape(std::vector<Segment> segments, double blend)
    : segments_(std::move(segments)), blend_(blend) {}

double VesselTreeShape::distance(const Eigen::Vector3d& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) {
    const double ds = s.distance(p);
    if (blend_ > 0.0 && std::isfinite(d)) {
      // polynomial smooth minimum
      const double h = std::max(blend_ - std::abs(d - ds), 0.0) / blend_;
      d = std::min(d, ds) - 0.25 * h * h * blend_;
    } else {
      d = std::min(d, ds);
    }
  }
  return d;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> VesselTreeShape::bounds() const {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& s : segments_) {
    const Eigen::Vector3d r = Eigen::Vector3d::Constant(s.radius + blend_);
    lo = lo.cwiseMin(s.start - r).cwiseMin(s.end - r);
    hi = hi.cwiseMax(s.start + r).cwiseMax(s.end + r);
  }
  return {lo, hi};
}

double VesselTreeShape::length_scale() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) r = std::min(r, s.radius);
  return r;
}

namespace {

BoundaryPlane make_cap(BoundaryKind kind, int index, const Eigen::Vector3d& point,
                       const Eigen::Vector3d& inward, double radius) {
  BoundaryPlane b;
  b.kind = kind;
  b.index = index;
  b.point = point;
  b.inward_normal = inward.normalized();
  b.radius = radius;
  return b;
}

void require_resolved(double size, double dx, const char* what) {
  if (!(size >= 4.0 * dx * (1.0 - 1e-12))) {
    throw GeometryError(std::string(what) +
                        " is below 4 dx, too small for halfway bounce-back to resolve");
  }
}

}  // namespace

std::shared_ptr<VesselTreeShape> make_cylinder_shape(double length, double radius) {
  if (!(radius > 0.0)) throw GeometryError("cylinder: radius must be > 0");
  if (!(length > 0.0)) throw GeometryError("cylinder: length must be > 0");
  auto shape = std::make_shared<VesselTreeShape>(
      std::vector<Segment>{{Eigen::Vector3d::Zero(), Eigen::Vector3d(length, 0, 0), radius}}, 0.0);
  shape->add_cap(
      make_cap(BoundaryKind::Inlet, 0, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), radius));
  shape->add_cap(make_cap(BoundaryKind::Outlet, 0, Eigen::Vector3d(length, 0, 0),
                          -Eigen::Vector3d::UnitX(), radius));
  return shape;
}

std::shared_ptr<VesselTreeShape> make_bifurcation_shape(const BifurcationSpec& spec) {
  if (!(spec.parent_radius > 0.0) || !(spec.daughter_radii[0] > 0.0) ||
      !(spec.daughter_radii[1] > 0.0)) {
    throw GeometryError("bifurcation: radii must be > 0");
  }
  if (!(spec.angle > 0.0 && spec.angle < 3.0)) {
    throw GeometryError("bifurcation: angle must lie in (0, 3) rad");
  }
  const Eigen::Vector3d junction(spec.parent_length, 0, 0);
  std::vector<Segment> segs;
  segs.push_back({Eigen::Vector3d::Zero(), junction, spec.parent_radius, false, true});
  std::array<Eigen::Vector3d, 2> dirs;
  for (int j = 0; j < 2; ++j) {
    const double half = 0.5 * spec.angle * (j == 0 ? 1.0 : -1.0);
    dirs[j] = Eigen::Vector3d(std::cos(half), std::sin(half), 0.0);
    segs.push_back({junction, junction + spec.daughter_lengths[j] * dirs[j],
                    spec.daughter_radii[j], true, false});
  }
  const double rmin = std::min({spec.parent_radius, spec.daughter_radii[0], spec.daughter_radii[1]});
  auto shape = std::make_shared<VesselTreeShape>(segs, spec.blend * rmin);
  shape->add_cap(make_cap(BoundaryKind::Inlet, 0, Eigen::Vector3d::Zero(),
                          Eigen::Vector3d::UnitX(), spec.parent_radius));
  for (int j = 0; j < 2; ++j) {
    shape->add_cap(make_cap(BoundaryKind::Outlet, j, segs[j + 1].end, -dirs[j],
                            spec.daughter_radii[j]));
  }
  return shape;
}

LatticeDomain voxelize_shape(std::shared_ptr<const ImplicitShape> shape, double dx,
                             std::array<bool, 3> periodic, int margin) {
  if (!(dx > 0.0)) throw GeometryError("voxelize: dx must be > 0");
  const auto [lo, hi] = shape->bounds();
  Eigen::Vector3i dims;
  Eigen::Vector3d origin;
  for (int a = 0; a < 3; ++a) {
    if (periodic[a]) {
      dims[a] = std::max(1, static_cast<int>(std::lround((hi[a] - lo[a]) / dx)));
      origin[a] = lo[a] + 0.5 * dx;
    } else {
      const int first = static_cast<int>(std::floor(lo[a] / dx - 0.5)) - margin;
      const int last = static_cast<int>(std::ceil(hi[a] / dx - 0.5)) + margin;
      dims[a] = last - first + 1;
      origin[a] = (first + 0.5) * dx;
    }
  }
  LatticeDomain domain(dims, dx, origin, periodic);
  domain.boundaries() = shape->caps();

  for (std::size_t g = 0; g < domain.site_count(); ++g) {
    if (shape->distance(domain.position(g)) < 0.0) domain.set_site_class(g, SiteClass::Fluid);
  }
  if (domain.fluid_count() == 0) throw GeometryError("voxelize: shape contains no fluid sites");

  const auto& caps = shape->caps();
  auto compute_links = [&] {
    for (std::size_t g = 0; g < domain.site_count(); ++g) {
      if (!is_fluid(domain.site_class(g))) continue;
      const Eigen::Vector3d p = domain.position(g);
      lattice::DirectionMask walls = 0, iolets = 0;
      int iolet = -1;
      for (int k = 1; k < kQ; ++k) {
        const auto nb = domain.neighbor(g, k);
        if (nb && is_fluid(domain.site_class(*nb))) continue;
        Eigen::Vector3d inside = p;
        Eigen::Vector3d outside =
            p + dx * Eigen::Vector3d(kDirections[k][0], kDirections[k][1], kDirections[k][2]);
        for (int it = 0; it < 60; ++it) {
          const Eigen::Vector3d mid = 0.5 * (inside + outside);
          (shape->distance(mid) < 0.0 ? inside : outside) = mid;
        }
        const Eigen::Vector3d hit = 0.5 * (inside + outside);
        int label = -1;
        for (std::size_t c = 0; c < caps.size() && label < 0; ++c) {
          const Eigen::Vector3d r = hit - caps[c].point;
          const double normal_dist = std::abs(r.dot(caps[c].inward_normal));
          const double radial = (r - r.dot(caps[c].inward_normal) * caps[c].inward_normal).norm();
          if (normal_dist <= 1e-3 * dx && radial <= caps[c].radius + dx) label = int(c);
        }
        if (label >= 0) {
          iolets |= lattice::DirectionMask(1u << k);
          if (iolet < 0) iolet = label;
        } else {
          walls |= lattice::DirectionMask(1u << k);
        }
      }
      domain.set_links(g, walls, iolets, iolets ? iolet : -1);
    }
    domain.reclassify_from_links();
  };
  compute_links();
  if (domain.inlet_count() > 0 && remove_unreachable(domain) > 0) compute_links();
  domain.set_surface(shape);
  return domain;
}

LatticeDomain generate_channel(double length, double height, double depth, double dx) {
  require_resolved(length, dx, "channel length");
  require_resolved(height, dx, "channel height");
  if (!(depth >= dx * (1.0 - 1e-12))) throw GeometryError("channel depth must be at least dx");
  return voxelize_shape(std::make_shared<ChannelShape>(length, height, depth), dx,
                        {false, false, true});
}

LatticeDomain generate_cylinder(double length, double radius, double dx) {
  if (!(radius > 0.0)) throw GeometryError("cylinder: radius must be > 0");
  require_resolved(2.0 * radius, dx, "cylinder diameter");
  require_resolved(length, dx, "cylinder length");
  return voxelize_shape(make_cylinder_shape(length, radius), dx);
}

LatticeDomain generate_bifurcation(const BifurcationSpec& spec, double dx) {
  require_resolved(2.0 * spec.parent_radius, dx, "parent diameter");
  require_resolved(2.0 * spec.daughter_radii[0], dx, "daughter 0 diameter");
  require_resolved(2.0 * spec.daughter_radii[1], dx, "daughter 1 diameter");
  require_resolved(spec.parent_length, dx, "parent length");
  require_resolved(spec.daughter_lengths[0], dx, "daughter 0 length");
  require_resolved(spec.daughter_lengths[1], dx, "daughter 1 length");
  return voxelize_shape(make_bifurcation_shape(spec), dx);
}

}  // namespace hemo::geometry
