#include "hemo/lattice/lattice.hpp"

#include <algorithm>

namespace hemo::lattice {

using geometry::is_fluid;

Lattice::Lattice(const geometry::LatticeDomain& domain) : domain_(&domain) {
  const std::size_t n = domain.site_count();
  site_of_.assign(n, -1);
  for (std::size_t g = 0; g < n; ++g) {
    if (is_fluid(domain.site_class(g))) {
      site_of_[g] = static_cast<std::int32_t>(grid_index_.size());
      grid_index_.push_back(g);
    }
  }
  if (grid_index_.empty()) throw geometry::GeometryError("lattice: domain has no fluid sites");

  sources_.assign(grid_index_.size() * kQ, -1);
  for (std::size_t s = 0; s < grid_index_.size(); ++s) {
    const std::size_t g = grid_index_[s];
    const DirectionMask walls = domain.wall_cuts(g);
    const DirectionMask iolets = domain.iolet_cuts(g);
    sources_[s * kQ] = static_cast<std::int32_t>(s);
    for (int k = 1; k < kQ; ++k) {
      const int out = kOpposite[k];  // link towards the upstream site
      if (has_direction(walls, out)) {
        wall_links_.push_back({static_cast<std::int32_t>(s), static_cast<std::int8_t>(k)});
        continue;
      }
      if (has_direction(iolets, out)) {
        iolet_links_.push_back({static_cast<std::int32_t>(s), static_cast<std::int8_t>(k)});
        continue;
      }
      const auto up = domain.neighbor(g, out);
      if (!up || site_of_[*up] < 0) {
        // An uncut link into solid: treat as wall so the table stays complete.
        wall_links_.push_back({static_cast<std::int32_t>(s), static_cast<std::int8_t>(k)});
        continue;
      }
      sources_[s * kQ + k] = site_of_[*up];
    }
  }
}

std::vector<Partition> make_partitions(std::size_t sites, int count) {
  count = std::max(1, count);
  std::vector<Partition> parts;
  parts.reserve(count);
  for (int p = 0; p < count; ++p) {
    parts.push_back({sites * p / count, sites * (p + 1) / count});
  }
  return parts;
}

void initialise_equilibrium(DistributionField& field, double rho, const Vector3<double>& u) {
  const Populations<double> feq = equilibrium(rho, u);
  for (std::size_t s = 0; s < field.size(); ++s) {
    field.at(s) = feq;
    field.next_at(s) = feq;
  }
}

void stream(DistributionField& field, const Lattice& lattice, Partition part) {
  const double* cur = field.current().data();
  double* nxt = field.next().data();
  for (std::size_t s = part.begin; s < part.end; ++s) {
    for (int k = 0; k < kQ; ++k) {
      const std::int32_t src = lattice.source(s, k);
      if (src >= 0) nxt[s * kQ + k] = cur[static_cast<std::size_t>(src) * kQ + k];
    }
  }
}

namespace {

void reflect(std::span<const Lattice::CutLink> links, const double* cur, double* nxt,
             Partition part) {
  auto first = std::lower_bound(links.begin(), links.end(), part.begin,
                                [](const Lattice::CutLink& l, std::size_t s) {
                                  return static_cast<std::size_t>(l.site) < s;
                                });
  for (auto it = first; it != links.end() && static_cast<std::size_t>(it->site) < part.end;
       ++it) {
    const std::size_t base = static_cast<std::size_t>(it->site) * kQ;
    nxt[base + it->k] = cur[base + kOpposite[it->k]];
  }
}

}  // namespace

void bounce_back(DistributionField& field, const Lattice& lattice, Partition part) {
  const double* cur = field.current().data();
  double* nxt = field.next().data();
  reflect(lattice.wall_links(), cur, nxt, part);
  reflect(lattice.iolet_links(), cur, nxt, part);
}

double total_mass(const DistributionField& field) {
  constexpr std::size_t kChunk = 4096;
  const auto data = field.current();
  double total = 0.0;
  for (std::size_t begin = 0; begin < data.size(); begin += kChunk) {
    const std::size_t end = std::min(data.size(), begin + kChunk);
    double partial = 0.0;
    for (std::size_t i = begin; i < end; ++i) partial += data[i];
    total += partial;
  }
  return total;
}

void CollisionStats::merge(const CollisionStats& other) {
  max_speed_sq = std::max(max_speed_sq, other.max_speed_sq);
  min_rho = std::min(min_rho, other.min_rho);
  max_rho = std::max(max_rho, other.max_rho);
  if (other.bad_site >= 0 && (bad_site < 0 || other.bad_site < bad_site)) {
    bad_site = other.bad_site;
  }
  tau_nonconverged += other.tau_nonconverged;
}

}  // namespace hemo::lattice
