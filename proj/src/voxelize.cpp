#include "hemo/geometry/voxelize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hemo/geometry/sampling.hpp"

namespace hemo::geometry {

using lattice::kDirections;
using lattice::kQ;

namespace {

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

/// Does the +x ray through (y, z) hit triangle t? On success returns the x of
/// the hit. Points on edges and vertices are owned by exactly one of the
/// triangles sharing them (half-open rule on the projected edge direction).
std::optional<double> ray_x_hit(const SurfaceMesh& mesh, int t, double y, double z) {
  Eigen::Vector3d v[3] = {mesh.vertex(t, 0), mesh.vertex(t, 1), mesh.vertex(t, 2)};
  double area = cross2(v[1].y() - v[0].y(), v[1].z() - v[0].z(), v[2].y() - v[0].y(),
                       v[2].z() - v[0].z());
  if (area == 0.0) return std::nullopt;  // edge-on to the ray
  if (area < 0.0) std::swap(v[1], v[2]);
  for (int e = 0; e < 3; ++e) {
    const Eigen::Vector3d& a = v[e];
    const Eigen::Vector3d& b = v[(e + 1) % 3];
    const double dy = b.y() - a.y(), dz = b.z() - a.z();
    const double side = cross2(dy, dz, y - a.y(), z - a.z());
    if (side < 0.0) return std::nullopt;
    if (side == 0.0) {
      const bool owned = dy > 0.0 || (dy == 0.0 && dz > 0.0);
      if (!owned) return std::nullopt;
    }
  }
  const Eigen::Vector3d n = (v[1] - v[0]).cross(v[2] - v[0]);
  return v[0].x() - (n.y() * (y - v[0].y()) + n.z() * (z - v[0].z())) / n.x();
}

/// Segment p + s (q - p), s in [0, 1], against a triangle (Moller-Trumbore).
std::optional<double> segment_hit(const SurfaceMesh& mesh, int t, const Eigen::Vector3d& p,
                                  const Eigen::Vector3d& q) {
  const Eigen::Vector3d a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
  const Eigen::Vector3d d = q - p;
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  const Eigen::Vector3d h = d.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Eigen::Vector3d s = p - a;
  const double u = inv * s.dot(h);
  constexpr double eps = 1e-9;
  if (u < -eps || u > 1.0 + eps) return std::nullopt;
  const Eigen::Vector3d qv = s.cross(e1);
  const double v = inv * d.dot(qv);
  if (v < -eps || u + v > 1.0 + eps) return std::nullopt;
  const double param = inv * e2.dot(qv);
  if (param < -eps || param > 1.0 + eps) return std::nullopt;
  return param;
}

Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

TriangleIndex::TriangleIndex(const SurfaceMesh& mesh, double cell) : mesh_(&mesh), cell_(cell) {
  Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  lo_ = lo.array() - cell;
  dims_ = (((hi - lo_) / cell).array().floor() + 2.0).cast<int>();
  buckets_.resize(static_cast<std::size_t>(dims_.prod()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Eigen::Vector3d tlo = mesh.vertex(int(t), 0), thi = tlo;
    for (int c = 1; c < 3; ++c) {
      tlo = tlo.cwiseMin(mesh.vertex(int(t), c));
      thi = thi.cwiseMax(mesh.vertex(int(t), c));
    }
    const Eigen::Vector3i a = cell_of(tlo), b = cell_of(thi);
    for (int i = a.x(); i <= b.x(); ++i)
      for (int j = a.y(); j <= b.y(); ++j)
        for (int k = a.z(); k <= b.z(); ++k)
          buckets_[(static_cast<std::size_t>(i) * dims_.y() + j) * dims_.z() + k].push_back(int(t));
  }
}

Eigen::Vector3i TriangleIndex::cell_of(const Eigen::Vector3d& p) const {
  Eigen::Vector3i c = ((p - lo_) / cell_).array().floor().cast<int>();
  return c.cwiseMax(Eigen::Vector3i::Zero()).cwiseMin(dims_ - Eigen::Vector3i::Ones());
}

std::vector<int> TriangleIndex::query(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) const {
  const Eigen::Vector3i a = cell_of(lo), b = cell_of(hi);
  std::vector<int> out;
  for (int i = a.x(); i <= b.x(); ++i)
    for (int j = a.y(); j <= b.y(); ++j)
      for (int k = a.z(); k <= b.z(); ++k) {
        const auto& bucket = buckets_[(static_cast<std::size_t>(i) * dims_.y() + j) * dims_.z() + k];
        out.insert(out.end(), bucket.begin(), bucket.end());
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MeshSurface::MeshSurface(SurfaceMesh mesh, double radius)
    : mesh_(std::move(mesh)), radius_(radius),
      index_(std::make_unique<TriangleIndex>(mesh_, radius)) {}

Eigen::Vector3d MeshSurface::outward_normal(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d r = Eigen::Vector3d::Constant(2.0 * radius_);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d nearest = Eigen::Vector3d::Zero();
  for (int t : index_->query(p - r, p + r)) {
    const Eigen::Vector3d q =
        closest_point_on_triangle(p, mesh_.vertex(t, 0), mesh_.vertex(t, 1), mesh_.vertex(t, 2));
    const double d = (q - p).norm();
    const Eigen::Vector3d an = mesh_.area_normal(t);
    if (d <= radius_) sum += an;
    if (d < best) {
      best = d;
      nearest = an;
    }
  }
  if (sum.squaredNorm() > 0.0) return sum.normalized();
  if (nearest.squaredNorm() > 0.0) return nearest.normalized();
  throw GeometryError("mesh surface: no facet near the query point");
}

bool point_inside(const SurfaceMesh& mesh, const Eigen::Vector3d& p) {
  int crossings = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto x = ray_x_hit(mesh, int(t), p.y(), p.z());
    if (x && *x > p.x()) ++crossings;
  }
  return crossings % 2 == 1;
}

LatticeDomain voxelize(const SurfaceMesh& mesh, double dx, const VoxelizeOptions& options) {
  if (!(dx > 0.0)) throw GeometryError("voxelize: dx must be > 0");
  if (auto problem = validate_mesh(mesh)) throw GeometryError("voxelize: " + *problem);

  Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Eigen::Vector3d anchor = options.anchor.value_or(lo);
  const Eigen::Vector3d first =
      anchor + dx * (((lo - anchor) / dx).array().floor() - options.margin).matrix();
  const Eigen::Vector3i dims =
      (((hi - first) / dx).array().floor() + 1.0 + options.margin).cast<int>();

  LatticeDomain domain(dims, dx, first);
  domain.boundaries() = cap_boundaries(mesh);

  // Bucket triangles by the (j, k) columns their yz-projection can touch.
  const int ny = dims.y(), nz = dims.z();
  std::vector<std::vector<int>> columns(static_cast<std::size_t>(ny) * nz);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo, zlo = ylo, zhi = -ylo;
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d v = mesh.vertex(int(t), c);
      ylo = std::min(ylo, v.y());
      yhi = std::max(yhi, v.y());
      zlo = std::min(zlo, v.z());
      zhi = std::max(zhi, v.z());
    }
    const int j0 = std::max(0, int(std::ceil((ylo - first.y()) / dx)));
    const int j1 = std::min(ny - 1, int(std::floor((yhi - first.y()) / dx)));
    const int k0 = std::max(0, int(std::ceil((zlo - first.z()) / dx)));
    const int k1 = std::min(nz - 1, int(std::floor((zhi - first.z()) / dx)));
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) columns[static_cast<std::size_t>(j) * nz + k].push_back(int(t));
  }

  std::vector<double> hits;
  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nz; ++k) {
      const double y = first.y() + dx * j, z = first.z() + dx * k;
      hits.clear();
      for (int t : columns[static_cast<std::size_t>(j) * nz + k]) {
        if (auto x = ray_x_hit(mesh, t, y, z)) hits.push_back(*x);
      }
      if (hits.empty()) continue;
      std::sort(hits.begin(), hits.end());
      for (int i = 0; i < dims.x(); ++i) {
        const double x = first.x() + dx * i;
        const auto after = hits.end() - std::upper_bound(hits.begin(), hits.end(), x);
        if (after % 2 == 1) domain.set_site_class(domain.index(i, j, k), SiteClass::Fluid);
      }
    }
  }
  if (domain.fluid_count() == 0) {
    throw GeometryError("voxelize: no fluid sites (dx too coarse for the mesh?)");
  }

  const TriangleIndex index(mesh, 2.0 * dx);
  auto compute_links = [&] {
    for (std::size_t g = 0; g < domain.site_count(); ++g) {
      if (!is_fluid(domain.site_class(g))) continue;
      const Eigen::Vector3d p = domain.position(g);
      lattice::DirectionMask walls = 0, iolets = 0;
      int iolet = -1;
      for (int k = 1; k < kQ; ++k) {
        const auto nb = domain.neighbor(g, k);
        if (nb && is_fluid(domain.site_class(*nb))) continue;
        const Eigen::Vector3d q =
            p + dx * Eigen::Vector3d(kDirections[k][0], kDirections[k][1], kDirections[k][2]);
        const Eigen::Vector3d pad = Eigen::Vector3d::Constant(1e-6 * dx);
        double best = std::numeric_limits<double>::infinity();
        int label = -1;
        for (int t : index.query(p.cwiseMin(q) - pad, p.cwiseMax(q) + pad)) {
          if (auto s = segment_hit(mesh, t, p, q); s && *s < best) {
            best = *s;
            label = mesh.cap_labels[t];
          }
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

  if (options.remove_unreachable && domain.inlet_count() > 0) {
    if (remove_unreachable(domain) > 0) compute_links();
  }
  if (domain.fluid_count() == 0) throw GeometryError("voxelize: no fluid sites after cleanup");
  domain.set_surface(std::make_shared<MeshSurface>(mesh, dx));
  return domain;
}

}  // namespace hemo::geometry
