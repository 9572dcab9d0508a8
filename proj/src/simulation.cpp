#include "hemo/driver/simulation.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "binary_io.hpp"
#include "hemo/geometry/mesh.hpp"
#include "hemo/geometry/voxelize.hpp"

namespace hemo::driver {

using lattice::kQ;

geometry::LatticeDomain build_domain(const RunConfig& c) {
  const auto& g = c.geometry;
  switch (g.kind) {
    case GeometryConfig::Kind::Channel:
      return geometry::generate_channel(g.length, g.height, g.depth > 0.0 ? g.depth : c.dx, c.dx);
    case GeometryConfig::Kind::Cylinder:
      return geometry::generate_cylinder(g.length, g.radius, c.dx);
    case GeometryConfig::Kind::Bifurcation:
      return geometry::generate_bifurcation(g.bifurcation, c.dx);
    case GeometryConfig::Kind::Mesh: {
      auto mesh = geometry::read_stl(g.mesh, g.mesh_scale);
      geometry::apply_cap_labels(mesh, geometry::read_cap_sidecar(g.caps));
      return geometry::voxelize(mesh, c.dx);
    }
    case GeometryConfig::Kind::Voxel:
      return geometry::read_domain(g.voxel_file);
  }
  throw ConfigError({"unknown geometry kind"});
}

std::vector<boundary::PressureTrace> build_traces(const RunConfig& c,
                                                  const geometry::LatticeDomain& domain) {
  std::vector<std::string> errors;
  std::vector<boundary::PressureTrace> traces(domain.boundaries().size());
  std::vector<bool> bound(traces.size(), false);
  for (const auto& t : c.traces) {
    int b = -1;
    for (std::size_t i = 0; i < domain.boundaries().size(); ++i) {
      if (domain.boundaries()[i].name() == t.boundary) b = static_cast<int>(i);
    }
    if (b < 0) {
      errors.push_back("[" + t.boundary + "] geometry has no such boundary");
      continue;
    }
    try {
      traces[b] = t.file.empty() ? boundary::generate_waveform(boundary::waveform_preset(
                                       t.preset, t.mean, t.amplitude, c.cycle_period, t.delay))
                                 : boundary::read_trace_csv(t.file, c.cycle_period);
      bound[b] = true;
    } catch (const std::exception& e) {
      errors.push_back("[" + t.boundary + "] " + e.what());
    }
  }
  for (std::size_t i = 0; i < bound.size(); ++i) {
    if (!bound[i]) errors.push_back("no pressure trace for " + domain.boundaries()[i].name());
  }
  if (!errors.empty()) throw ConfigError(errors);
  return traces;
}

namespace {

int reference_index(const RunConfig& c, const geometry::LatticeDomain& domain) {
  if (c.reference == "none") return -1;
  for (std::size_t i = 0; i < domain.boundaries().size(); ++i) {
    if (domain.boundaries()[i].name() == c.reference) return static_cast<int>(i);
  }
  throw ConfigError({"[boundary] reference '" + c.reference + "' is not a boundary of the geometry"});
}

constexpr char kCheckpointMagic[8] = {'H', 'E', 'M', 'O', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

Simulation::Simulation(const RunConfig& config, geometry::LatticeDomain domain)
    : config_(config),
      domain_(std::make_unique<geometry::LatticeDomain>(std::move(domain))),
      scaling_(config.dt, config.dx, config.rho) {
  init(build_traces(config_, *domain_));
}

Simulation::Simulation(const RunConfig& config, geometry::LatticeDomain domain,
                       std::vector<boundary::PressureTrace> traces)
    : config_(config),
      domain_(std::make_unique<geometry::LatticeDomain>(std::move(domain))),
      scaling_(config.dt, config.dx, config.rho) {
  init(std::move(traces));
}

void Simulation::init(std::vector<boundary::PressureTrace> traces) {
  rheology::validate(config_.rheology);
  if (std::abs(domain_->dx() - config_.dx) > 1e-12 * config_.dx) {
    throw ConfigError({"domain spacing does not match the configured dx"});
  }
  lattice_ = std::make_unique<lattice::Lattice>(*domain_);
  boundaries_ = std::make_unique<boundary::PressureBoundarySet>(
      *lattice_, std::move(traces), scaling_, reference_index(config_, *domain_));
  field_ = lattice::DistributionField(lattice_->size());
  const double eta_start =
      std::visit([](auto& m) { return m.max_viscosity(); }, config_.rheology);
  const double tau0 = rheology::relaxation_time(eta_start, scaling_);
  if (!(rheology::relaxation_time(
            std::visit([](auto& m) { return m.min_viscosity(); }, config_.rheology), scaling_) >
        0.5)) {
    throw ConfigError({"relaxation time <= 0.5"});
  }
  tau_.assign(lattice_->size(), tau0);
  lattice::initialise_equilibrium(field_, 1.0, lattice::Vector3<double>::Zero());
  boundaries_->apply(field_.current(), 0.0);
  diag_.sites = lattice_->size();
  sample_every_ = config_.effective_sample_every();
  set_threads(config_.threads, config_.partitions);
}

void Simulation::set_threads(int threads, int partitions) {
  threads_ = std::max(1, threads);
  const int count = partitions > 0 ? partitions : threads_;
  partitions_ = lattice::make_partitions(lattice_->size(), count);
}

void Simulation::add_probe(const std::string& name, const Eigen::Vector3d& position) {
  const auto mid =
      geometry::nearest_wall_link(*domain_, position, config_.snap_distance * config_.dx);
  if (!mid) {
    std::ostringstream os;
    os << "sample point '" << name << "' at (" << position.transpose()
       << ") has no cut wall link within " << config_.snap_distance << " dx";
    throw geometry::GeometryError(os.str());
  }
  Probe p;
  p.name = name;
  p.point = geometry::wall_normal(*domain_, *mid);
  p.site = lattice_->site_of(p.point.site);
  probes_.push_back(std::move(p));
}

double Simulation::local_tau(std::size_t s) const {
  if (rheology::is_constant(config_.rheology)) return tau_[s];
  const lattice::Populations<double> f = field_.at(s);
  const double rho = lattice::density(f);
  const lattice::Vector3<double> u = lattice::momentum(f) / rho;
  const auto pi = lattice::nonequilibrium_moment<double>(f, rho, u);
  return rheology::local_tau_update(pi, rho, tau_[s], config_.rheology, scaling_,
                                    config_.tau_solver)
      .tau;
}

Eigen::Matrix3d Simulation::stress(std::size_t s) const {
  const lattice::Populations<double> f = field_.at(s);
  const double rho = lattice::density(f);
  const lattice::Vector3<double> u = lattice::momentum(f) / rho;
  const auto pi = lattice::nonequilibrium_moment<double>(f, rho, u);
  return wss::deviatoric_stress(pi, local_tau(s), scaling_);
}

double Simulation::density(std::size_t s) const {
  return lattice::density<double>(field_.at(s)) * scaling_.rho();
}

double Simulation::pressure(std::size_t s) const {
  const int ref = boundaries_->reference();
  const double p_ref =
      ref >= 0 ? boundary::sample_pressure(boundaries_->traces()[ref], time()) : 0.0;
  return boundary::pressure_from_density(lattice::density<double>(field_.at(s)), p_ref, scaling_);
}

Eigen::Vector3d Simulation::velocity(std::size_t s) const {
  const lattice::Populations<double> f = field_.at(s);
  return lattice::momentum(f) / lattice::density(f) * scaling_.velocity_unit();
}

double Simulation::shear_rate(std::size_t s) const {
  const lattice::Populations<double> f = field_.at(s);
  const double rho = lattice::density(f);
  const lattice::Vector3<double> u = lattice::momentum(f) / rho;
  const auto pi = lattice::nonequilibrium_moment<double>(f, rho, u);
  return rheology::shear_rate_from_moment(pi, rho, local_tau(s), scaling_);
}

double Simulation::viscosity(std::size_t s) const {
  return rheology::viscosity_from_tau(local_tau(s), scaling_);
}

void Simulation::sample() {
  for (auto& p : probes_) {
    const Eigen::Matrix3d T = stress(p.site);
    p.samples.push_back({time(), wss::traction(T, p.point.unit_normal)});
  }
}

void Simulation::check_limits(const lattice::CollisionStats& stats) {
  if (stats.bad_site >= 0) {
    std::ostringstream os;
    os << "numerical instability at step " << step_ << ": non-finite or non-positive density at site "
       << stats.bad_site << " (position " << domain_->position(lattice_->grid_index(stats.bad_site)).transpose()
       << " m)";
    throw InstabilityError(os.str(), step_, stats.bad_site);
  }
  diag_.mach = std::sqrt(stats.max_speed_sq * 3.0);
  diag_.density_variation = stats.max_rho - stats.min_rho;
  diag_.max_mach = std::max(diag_.max_mach, diag_.mach);
  diag_.max_density_variation = std::max(diag_.max_density_variation, diag_.density_variation);
  diag_.tau_nonconverged += stats.tau_nonconverged;
  if (diag_.mach >= config_.max_mach) {
    std::ostringstream os;
    os << "numerical instability at step " << step_ << ": Mach " << diag_.mach
       << " reached the limit " << config_.max_mach;
    throw InstabilityError(os.str(), step_, -1);
  }
  if (diag_.density_variation >= config_.max_density_variation) {
    std::ostringstream os;
    os << "numerical instability at step " << step_ << ": density variation "
       << diag_.density_variation << " reached the limit " << config_.max_density_variation;
    throw InstabilityError(os.str(), step_, -1);
  }
}

void Simulation::step() {
  const auto t0 = std::chrono::steady_clock::now();
  if (step_ % sample_every_ == 0) sample();

  const auto nparts = static_cast<int>(partitions_.size());
  std::vector<lattice::CollisionStats> stats(nparts);
  const auto& model = config_.rheology;
  if (rheology::is_constant(model)) {
    const double tau = tau_.empty() ? 1.0 : tau_[0];
#pragma omp parallel for num_threads(threads_) schedule(static, 1)
    for (int p = 0; p < nparts; ++p) {
      lattice::collide_range(field_, partitions_[p], [tau](std::size_t) { return tau; }, stats[p]);
    }
  } else {
#pragma omp parallel for num_threads(threads_) schedule(static, 1)
    for (int p = 0; p < nparts; ++p) {
      auto& st = stats[p];
      lattice::collide_range(
          field_, partitions_[p],
          [&](std::size_t s, double rho, const lattice::Tensor3<double>& pi) {
            const auto up =
                rheology::local_tau_update(pi, rho, tau_[s], model, scaling_, config_.tau_solver);
            if (!up.converged) ++st.tau_nonconverged;
            tau_[s] = up.tau;
            return up.tau;
          },
          st);
    }
  }
  lattice::CollisionStats merged;
  for (const auto& s : stats) merged.merge(s);
  check_limits(merged);

#pragma omp parallel for num_threads(threads_) schedule(static, 1)
  for (int p = 0; p < nparts; ++p) {
    lattice::stream(field_, *lattice_, partitions_[p]);
    lattice::bounce_back(field_, *lattice_, partitions_[p]);
  }
  try {
    boundaries_->apply(field_.next(), (step_ + 1) * scaling_.dt());
  } catch (const boundary::BoundaryError& e) {
    throw InstabilityError(e.what(), step_, -1);
  }
  field_.swap();
  ++step_;

  wall_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  diag_.seconds_per_step = wall_seconds_ / static_cast<double>(step_);
}

void Simulation::advance(long steps) {
  for (long i = 0; i < steps; ++i) step();
}

void Simulation::write_snapshot(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto& d = *domain_;
  const auto n = d.dims();
  os << "# vtk DataFile Version 3.0\n";
  os << "hemotbd snapshot t=" << std::setprecision(10) << time() << " s\n";
  os << "ASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << n[0] << ' ' << n[1] << ' ' << n[2] << "\n";
  os << std::setprecision(12);
  os << "ORIGIN " << d.origin().x() << ' ' << d.origin().y() << ' ' << d.origin().z() << "\n";
  os << "SPACING " << d.dx() << ' ' << d.dx() << ' ' << d.dx() << "\n";
  os << "POINT_DATA " << d.site_count() << "\n";
  os << std::setprecision(8);

  // VTK orders points with x fastest.
  auto each = [&](auto&& emit) {
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) {
          const std::int32_t s = lattice_->site_of(d.index(i, j, k));
          emit(s);
        }
  };
  os << "SCALARS fluid int 1\nLOOKUP_TABLE default\n";
  each([&](std::int32_t s) { os << (s >= 0 ? 1 : 0) << '\n'; });
  os << "SCALARS density_kg_m3 double 1\nLOOKUP_TABLE default\n";
  each([&](std::int32_t s) { os << (s >= 0 ? density(s) : 0.0) << '\n'; });
  os << "SCALARS pressure_pa double 1\nLOOKUP_TABLE default\n";
  each([&](std::int32_t s) { os << (s >= 0 ? pressure(s) : 0.0) << '\n'; });
  os << "VECTORS velocity_m_s double\n";
  each([&](std::int32_t s) {
    const Eigen::Vector3d u = s >= 0 ? velocity(s) : Eigen::Vector3d::Zero();
    os << u.x() << ' ' << u.y() << ' ' << u.z() << '\n';
  });
  os << "SCALARS shear_rate_1_s double 1\nLOOKUP_TABLE default\n";
  each([&](std::int32_t s) { os << (s >= 0 ? shear_rate(s) : 0.0) << '\n'; });
  os << "SCALARS viscosity_pa_s double 1\nLOOKUP_TABLE default\n";
  each([&](std::int32_t s) { os << (s >= 0 ? viscosity(s) : 0.0) << '\n'; });
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void Simulation::write_checkpoint(const std::filesystem::path& path) const {
  using io::put_le;
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    put_le<std::uint32_t>(os, kCheckpointVersion);
    for (int a = 0; a < 3; ++a) put_le<std::int32_t>(os, domain_->dims()[a]);
    put_le<std::uint64_t>(os, lattice_->size());
    put_le<std::int64_t>(os, step_);
    for (double v : field_.current()) put_le<double>(os, v);
    for (double v : tau_) put_le<double>(os, v);
    put_le<double>(os, diag_.max_mach);
    put_le<double>(os, diag_.max_density_variation);
    put_le<std::uint64_t>(os, diag_.tau_nonconverged);
    put_le<double>(os, diag_.mach);
    put_le<double>(os, diag_.density_variation);
    put_le<double>(os, wall_seconds_);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(probes_.size()));
    for (const auto& p : probes_) {
      put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.name.size()));
      os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      put_le<std::int32_t>(os, p.site);
      put_le<std::uint64_t>(os, p.samples.size());
      for (const auto& s : p.samples) {
        put_le<double>(os, s.t);
        for (int a = 0; a < 3; ++a) put_le<double>(os, s.traction[a]);
      }
    }
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void Simulation::restore_checkpoint(const std::filesystem::path& path) {
  using io::get_le;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw std::runtime_error(path.string() + ": not a checkpoint file");
  }
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(path.string() + ": checkpoint version " + std::to_string(version) +
                             " is not supported");
  }
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) dims[a] = get_le<std::int32_t>(is);
  const auto sites = get_le<std::uint64_t>(is);
  if (dims != domain_->dims() || sites != lattice_->size()) {
    throw std::runtime_error(path.string() + ": checkpoint dims/site count do not match the domain");
  }
  const auto step = get_le<std::int64_t>(is);
  std::vector<double> f(sites * kQ), tau(sites);
  for (double& v : f) v = get_le<double>(is);
  for (double& v : tau) v = get_le<double>(is);
  Diagnostics diag = diag_;
  diag.max_mach = get_le<double>(is);
  diag.max_density_variation = get_le<double>(is);
  diag.tau_nonconverged = get_le<std::uint64_t>(is);
  diag.mach = get_le<double>(is);
  diag.density_variation = get_le<double>(is);
  const double wall = get_le<double>(is);
  const auto nprobes = get_le<std::uint32_t>(is);
  if (nprobes != probes_.size()) {
    throw std::runtime_error(path.string() + ": checkpoint probe count does not match");
  }
  std::vector<std::vector<wss::TractionSample>> samples(nprobes);
  for (std::uint32_t i = 0; i < nprobes; ++i) {
    const auto len = get_le<std::uint32_t>(is);
    if (len > 4096) throw std::runtime_error(path.string() + ": corrupt probe name");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw std::runtime_error("unexpected end of file");
    const auto site = get_le<std::int32_t>(is);
    if (name != probes_[i].name || site != probes_[i].site) {
      throw std::runtime_error(path.string() + ": checkpoint probe '" + name +
                               "' does not match the configured probes");
    }
    const auto n = get_le<std::uint64_t>(is);
    samples[i].resize(n);
    for (auto& s : samples[i]) {
      s.t = get_le<double>(is);
      for (int a = 0; a < 3; ++a) s.traction[a] = get_le<double>(is);
    }
  }
  std::copy(f.begin(), f.end(), field_.current().begin());
  tau_ = std::move(tau);
  step_ = step;
  diag_ = diag;
  wall_seconds_ = wall;
  for (std::uint32_t i = 0; i < nprobes; ++i) probes_[i].samples = std::move(samples[i]);
}

}  // namespace hemo::driver
