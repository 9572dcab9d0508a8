#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "hemo/geometry/lattice_domain.hpp"
#include "hemo/lattice/kernels.hpp"

namespace hemo::lattice {

/// Fluid-site connectivity for the two-buffer pull scheme.
///
/// Fluid sites are numbered in grid order, so a contiguous range of site
/// indices is a stack of x-slabs. For each site and incoming direction k the
/// table holds the upstream fluid site x - c_k, or -1 when that link is cut by
/// a wall or an inlet/outlet cap.
class Lattice {
 public:
  struct CutLink {
    std::int32_t site;
    std::int8_t k;  // incoming direction to be refilled
  };

  explicit Lattice(const geometry::LatticeDomain& domain);

  const geometry::LatticeDomain& domain() const { return *domain_; }
  std::size_t size() const { return grid_index_.size(); }

  std::size_t grid_index(std::size_t site) const { return grid_index_[site]; }
  /// Fluid site index of a grid site, or -1 for solid.
  std::int32_t site_of(std::size_t grid) const { return site_of_[grid]; }

  std::int32_t source(std::size_t site, int k) const { return sources_[site * kQ + k]; }

  std::span<const CutLink> wall_links() const { return wall_links_; }
  std::span<const CutLink> iolet_links() const { return iolet_links_; }

 private:
  const geometry::LatticeDomain* domain_;
  std::vector<std::size_t> grid_index_;
  std::vector<std::int32_t> site_of_;
  std::vector<std::int32_t> sources_;
  std::vector<CutLink> wall_links_;
  std::vector<CutLink> iolet_links_;
};

/// Per-site D3Q15 populations, double-buffered (current, next).
class DistributionField {
 public:
  using Map = Eigen::Map<Populations<double>>;
  using ConstMap = Eigen::Map<const Populations<double>>;

  explicit DistributionField(std::size_t sites = 0)
      : current_(sites * kQ, 0.0), next_(sites * kQ, 0.0) {}

  std::size_t size() const { return current_.size() / kQ; }

  Map at(std::size_t site) { return Map(current_.data() + site * kQ); }
  ConstMap at(std::size_t site) const { return ConstMap(current_.data() + site * kQ); }
  Map next_at(std::size_t site) { return Map(next_.data() + site * kQ); }
  ConstMap next_at(std::size_t site) const { return ConstMap(next_.data() + site * kQ); }

  std::span<double> current() { return current_; }
  std::span<const double> current() const { return current_; }
  std::span<double> next() { return next_; }
  std::span<const double> next() const { return next_; }

  void swap() { current_.swap(next_); }

 private:
  std::vector<double> current_;
  std::vector<double> next_;
};

/// Contiguous range of fluid sites owned by one worker.
struct Partition {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits [0, sites) into `count` near-equal contiguous slabs.
std::vector<Partition> make_partitions(std::size_t sites, int count);

/// Sets every site to the equilibrium at (rho, u).
void initialise_equilibrium(DistributionField& field, double rho, const Vector3<double>& u);

/// Pull streaming along uncut links: next[x][k] = current[x - c_k][k].
void stream(DistributionField& field, const Lattice& lattice, Partition part);

/// Halfway bounce-back on cut links: next[x][k] = current[x][opposite(k)].
/// Inlet/outlet links receive the same placeholder; the pressure boundary
/// overwrites those sites afterwards.
void bounce_back(DistributionField& field, const Lattice& lattice, Partition part);

/// Reduction over a fixed chunking of the site range, independent of partitioning.
double total_mass(const DistributionField& field);

struct CollisionStats {
  double max_speed_sq = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  double max_rho = -std::numeric_limits<double>::infinity();
  std::int64_t bad_site = -1;  // first non-finite or non-positive density site
  std::uint64_t tau_nonconverged = 0;

  void merge(const CollisionStats& other);
};

/// Collides sites in `part` in place (current buffer).
///
/// `tau_of` is either `double(std::size_t site)` for models whose relaxation
/// time does not depend on the stress, or
/// `double(std::size_t site, double rho, const Tensor3<double>& pi_neq)`.
template <typename TauFn>
void collide_range(DistributionField& field, Partition part, TauFn&& tau_of,
                   CollisionStats& stats) {
  for (std::size_t s = part.begin; s < part.end; ++s) {
    auto f = field.at(s);
    const Populations<double> fin = f;
    const double rho = density(fin);
    const Vector3<double> u = momentum(fin) / rho;
    if (!(rho > 0.0) || !std::isfinite(rho) || !u.allFinite()) {
      if (stats.bad_site < 0) stats.bad_site = static_cast<std::int64_t>(s);
      continue;
    }
    stats.min_rho = std::min(stats.min_rho, rho);
    stats.max_rho = std::max(stats.max_rho, rho);
    stats.max_speed_sq = std::max(stats.max_speed_sq, u.squaredNorm());
    const Populations<double> feq = equilibrium(rho, u);
    double tau;
    if constexpr (std::is_invocable_r_v<double, TauFn, std::size_t>) {
      tau = tau_of(s);
    } else {
      tau = tau_of(s, rho, nonequilibrium_moment<double>(fin, rho, u));
    }
    f = relax(fin, feq, tau);
  }
}

}  // namespace hemo::lattice
