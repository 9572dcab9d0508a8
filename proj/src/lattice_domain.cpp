#include "hemo/geometry/lattice_domain.hpp"

#include <algorithm>
#include <sstream>

namespace hemo::geometry {

using lattice::kDirections;
using lattice::kQ;

LatticeDomain::LatticeDomain(Eigen::Vector3i dims, double dx, Eigen::Vector3d origin,
                             std::array<bool, 3> periodic)
    : dims_(dims), dx_(dx), origin_(origin), periodic_(periodic) {
  if ((dims.array() <= 0).any()) throw GeometryError("lattice domain: dims must be positive");
  if (!(dx > 0.0)) throw GeometryError("lattice domain: dx must be positive");
  const auto n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  site_class_.assign(n, SiteClass::Solid);
  wall_cuts_.assign(n, 0);
  iolet_cuts_.assign(n, 0);
  iolet_id_.assign(n, -1);
}

Eigen::Vector3i LatticeDomain::coords(std::size_t idx) const {
  const int k = static_cast<int>(idx % dims_[2]);
  idx /= dims_[2];
  const int j = static_cast<int>(idx % dims_[1]);
  const int i = static_cast<int>(idx / dims_[1]);
  return {i, j, k};
}

Eigen::Vector3d LatticeDomain::position(std::size_t idx) const { return position(coords(idx)); }

std::optional<std::size_t> LatticeDomain::neighbor(std::size_t idx, int k) const {
  Eigen::Vector3i c = coords(idx);
  for (int a = 0; a < 3; ++a) {
    c[a] += kDirections[k][a];
    if (c[a] < 0 || c[a] >= dims_[a]) {
      if (!periodic_[a]) return std::nullopt;
      c[a] = (c[a] + dims_[a]) % dims_[a];
    }
  }
  return index(c[0], c[1], c[2]);
}

int LatticeDomain::inlet_count() const {
  return static_cast<int>(std::count_if(boundaries_.begin(), boundaries_.end(), [](auto& b) {
    return b.kind == BoundaryKind::Inlet;
  }));
}

int LatticeDomain::outlet_count() const {
  return static_cast<int>(boundaries_.size()) - inlet_count();
}

int LatticeDomain::find_boundary(BoundaryKind kind, int index) const {
  for (std::size_t b = 0; b < boundaries_.size(); ++b) {
    if (boundaries_[b].kind == kind && boundaries_[b].index == index) return static_cast<int>(b);
  }
  return -1;
}

std::size_t LatticeDomain::fluid_count() const {
  return site_class_.size() - count(SiteClass::Solid);
}

std::size_t LatticeDomain::count(SiteClass c) const {
  return static_cast<std::size_t>(std::count(site_class_.begin(), site_class_.end(), c));
}

void LatticeDomain::reclassify_from_links() {
  for (std::size_t i = 0; i < site_class_.size(); ++i) {
    if (site_class_[i] == SiteClass::Solid) {
      wall_cuts_[i] = 0;
      iolet_cuts_[i] = 0;
      iolet_id_[i] = -1;
      continue;
    }
    if (iolet_cuts_[i] != 0 && iolet_id_[i] >= 0) {
      site_class_[i] = boundaries_[iolet_id_[i]].kind == BoundaryKind::Inlet ? SiteClass::Inlet
                                                                            : SiteClass::Outlet;
    } else if (wall_cuts_[i] != 0) {
      site_class_[i] = SiteClass::Wall;
    } else {
      site_class_[i] = SiteClass::Fluid;
    }
  }
}

std::optional<std::string> LatticeDomain::check_links() const {
  for (std::size_t i = 0; i < site_class_.size(); ++i) {
    if (!is_fluid(site_class_[i])) continue;
    if (wall_cuts_[i] & iolet_cuts_[i]) {
      std::ostringstream os;
      os << "site " << i << " has a link flagged as both wall and iolet";
      return os.str();
    }
    for (int k = 1; k < kQ; ++k) {
      const auto nb = neighbor(i, k);
      const bool solid = !nb || !is_fluid(site_class_[*nb]);
      const bool cut = lattice::has_direction(wall_cuts_[i] | iolet_cuts_[i], k);
      if (solid != cut) {
        std::ostringstream os;
        os << "site " << i << " direction " << k
           << (solid ? " reaches solid without a cut flag" : " is cut but reaches fluid");
        return os.str();
      }
    }
  }
  return std::nullopt;
}

}  // namespace hemo::geometry
