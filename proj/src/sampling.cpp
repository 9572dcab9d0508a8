#include "hemo/geometry/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace hemo::geometry {

using lattice::kDirections;
using lattice::kQ;

namespace {

Eigen::Vector3d dir(int k) {
  return Eigen::Vector3d(kDirections[k][0], kDirections[k][1], kDirections[k][2]);
}

// Face neighbours are the six axis directions 1..6.
template <typename Visit>
void face_neighbors(const LatticeDomain& d, std::size_t g, Visit&& visit) {
  for (int k = 1; k <= 6; ++k) {
    if (auto nb = d.neighbor(g, k)) visit(*nb);
  }
}

std::vector<std::uint8_t> flood_from_inlets(const LatticeDomain& d) {
  std::vector<std::uint8_t> seen(d.site_count(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    if (d.site_class(g) == SiteClass::Inlet) {
      seen[g] = 1;
      queue.push_back(g);
    }
  }
  while (!queue.empty()) {
    const std::size_t g = queue.front();
    queue.pop_front();
    face_neighbors(d, g, [&](std::size_t nb) {
      if (!seen[nb] && is_fluid(d.site_class(nb))) {
        seen[nb] = 1;
        queue.push_back(nb);
      }
    });
  }
  return seen;
}

}  // namespace

Eigen::Vector3d link_normal(const LatticeDomain& domain, std::size_t site) {
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  const auto cuts = domain.wall_cuts(site);
  for (int k = 1; k < kQ; ++k) {
    if (lattice::has_direction(cuts, k)) n += lattice::D3Q15<double>::weight(k) * dir(k);
  }
  if (n.norm() == 0.0) throw GeometryError("link normal: site has no net wall direction");
  return n.normalized();
}

std::optional<Eigen::Vector3d> nearest_wall_link(const LatticeDomain& domain,
                                                 const Eigen::Vector3d& position,
                                                 double max_distance) {
  const double dx = domain.dx();
  const int reach = static_cast<int>(std::ceil(max_distance / dx)) + 1;
  const Eigen::Vector3d rel = (position - domain.origin()) / dx;
  const Eigen::Vector3i c(static_cast<int>(std::lround(rel.x())),
                          static_cast<int>(std::lround(rel.y())),
                          static_cast<int>(std::lround(rel.z())));
  std::optional<Eigen::Vector3d> best;
  double best_dist = max_distance;
  for (int i = c.x() - reach; i <= c.x() + reach; ++i) {
    for (int j = c.y() - reach; j <= c.y() + reach; ++j) {
      for (int k = c.z() - reach; k <= c.z() + reach; ++k) {
        const Eigen::Vector3i q(i, j, k);
        if ((q.array() < 0).any() || (q.array() >= domain.dims().array()).any()) continue;
        const std::size_t g = domain.index(i, j, k);
        if (!is_fluid(domain.site_class(g)) || domain.wall_cuts(g) == 0) continue;
        for (int l = 1; l < kQ; ++l) {
          if (!lattice::has_direction(domain.wall_cuts(g), l)) continue;
          const Eigen::Vector3d mid = domain.position(q) + 0.5 * dx * dir(l);
          const double dist = (mid - position).norm();
          if (dist <= best_dist) {
            if (dist == best_dist && best) continue;
            best_dist = dist;
            best = mid;
          }
        }
      }
    }
  }
  return best;
}

WallSamplePoint wall_normal(const LatticeDomain& domain, const Eigen::Vector3d& position) {
  const double dx = domain.dx();
  const Eigen::Vector3d rel = (position - domain.origin()) / dx;
  const Eigen::Vector3i c(static_cast<int>(std::lround(rel.x())),
                          static_cast<int>(std::lround(rel.y())),
                          static_cast<int>(std::lround(rel.z())));
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_site = 0;
  for (int i = c.x() - 2; i <= c.x() + 2; ++i) {
    for (int j = c.y() - 2; j <= c.y() + 2; ++j) {
      for (int k = c.z() - 2; k <= c.z() + 2; ++k) {
        Eigen::Vector3i q(i, j, k);
        bool ok = true;
        for (int a = 0; a < 3; ++a) {
          if (q[a] < 0 || q[a] >= domain.dims()[a]) {
            if (!domain.periodic()[a]) ok = false;
            q[a] = (q[a] % domain.dims()[a] + domain.dims()[a]) % domain.dims()[a];
          }
        }
        if (!ok) continue;
        const std::size_t g = domain.index(q[0], q[1], q[2]);
        if (!is_fluid(domain.site_class(g)) || domain.wall_cuts(g) == 0) continue;
        const Eigen::Vector3d p = domain.origin() + dx * Eigen::Vector3i(i, j, k).cast<double>();
        for (int l = 1; l < kQ; ++l) {
          if (!lattice::has_direction(domain.wall_cuts(g), l)) continue;
          const double dist = (p + 0.5 * dx * dir(l) - position).norm();
          if (dist < best) {
            best = dist;
            best_site = g;
          }
        }
      }
    }
  }
  if (!(best <= dx)) {
    std::ostringstream os;
    os << "wall sample point (" << position.transpose()
       << ") is not within one dx of a cut wall link";
    throw GeometryError(os.str());
  }
  WallSamplePoint w;
  w.position = position;
  w.site = best_site;
  w.unit_normal = domain.surface() ? domain.surface()->outward_normal(position)
                                   : link_normal(domain, best_site);
  return w;
}

std::size_t fluid_components(const LatticeDomain& domain) {
  std::vector<std::uint8_t> seen(domain.site_count(), 0);
  std::size_t components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t g = 0; g < domain.site_count(); ++g) {
    if (seen[g] || !is_fluid(domain.site_class(g))) continue;
    ++components;
    seen[g] = 1;
    stack.push_back(g);
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      face_neighbors(domain, s, [&](std::size_t nb) {
        if (!seen[nb] && is_fluid(domain.site_class(nb))) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
      });
    }
  }
  return components;
}

bool reachable_from_inlets(const LatticeDomain& domain) {
  const auto seen = flood_from_inlets(domain);
  for (std::size_t g = 0; g < domain.site_count(); ++g) {
    if (is_fluid(domain.site_class(g)) && !seen[g]) return false;
  }
  return true;
}

std::size_t remove_unreachable(LatticeDomain& domain) {
  const auto seen = flood_from_inlets(domain);
  std::size_t removed = 0;
  for (std::size_t g = 0; g < domain.site_count(); ++g) {
    if (is_fluid(domain.site_class(g)) && !seen[g]) {
      domain.set_site_class(g, SiteClass::Solid);
      ++removed;
    }
  }
  if (removed > 0) domain.reclassify_from_links();
  return removed;
}

std::int64_t euler_characteristic(const LatticeDomain& domain) {
  // Cells of the cubical complex live at doubled coordinates; a cell's
  // dimension is the number of odd coordinates.
  const Eigen::Vector3i n = 2 * domain.dims() + Eigen::Vector3i::Ones();
  std::vector<std::uint8_t> cell(static_cast<std::size_t>(n[0]) * n[1] * n[2], 0);
  for (std::size_t g = 0; g < domain.site_count(); ++g) {
    if (!is_fluid(domain.site_class(g))) continue;
    const Eigen::Vector3i c = 2 * domain.coords(g);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int e = 0; e < 3; ++e)
          cell[(static_cast<std::size_t>(c[0] + a) * n[1] + (c[1] + b)) * n[2] + (c[2] + e)] = 1;
  }
  std::int64_t chi = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        if (!cell[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k]) continue;
        const int odd = (i & 1) + (j & 1) + (k & 1);
        chi += (odd % 2 == 0) ? 1 : -1;
      }
  return chi;
}

}  // namespace hemo::geometry
