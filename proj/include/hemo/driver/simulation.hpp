#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hemo/boundary.hpp"
#include "hemo/driver/config.hpp"
#include "hemo/geometry/sampling.hpp"
#include "hemo/lattice/lattice.hpp"
#include "hemo/rheology.hpp"
#include "hemo/wss.hpp"

namespace hemo::driver {

/// Non-finite populations, non-positive density, or a diagnostic limit exceeded.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, long step, std::int64_t site)
      : std::runtime_error(what), step_(step), site_(site) {}
  long step() const { return step_; }
  std::int64_t site() const { return site_; }

 private:
  long step_;
  std::int64_t site_;
};

struct Diagnostics {
  double max_mach = 0.0;               // running maximum
  double max_density_variation = 0.0;  // running maximum of (rho_max - rho_min) / rho0
  std::uint64_t tau_nonconverged = 0;  // sites where the local tau solve hit its iteration cap
  double seconds_per_step = 0.0;       // mean wall-clock
  std::size_t sites = 0;
  // last step
  double mach = 0.0;
  double density_variation = 0.0;
};

/// Builds the lattice domain described by a configuration.
geometry::LatticeDomain build_domain(const RunConfig& config);

/// Pressure traces for every boundary of `domain`, in boundaries() order.
std::vector<boundary::PressureTrace> build_traces(const RunConfig& config,
                                                  const geometry::LatticeDomain& domain);

/// Time stepper. Per step: sample, collide, stream, bounce back, apply the
/// pressure boundaries for the new time level, swap buffers.
class Simulation {
 public:
  struct Probe {
    std::string name;
    geometry::WallSamplePoint point;
    std::int32_t site;  // fluid site index
    std::vector<wss::TractionSample> samples;
  };

  Simulation(const RunConfig& config, geometry::LatticeDomain domain);
  Simulation(const RunConfig& config, geometry::LatticeDomain domain,
             std::vector<boundary::PressureTrace> traces);

  const RunConfig& config() const { return config_; }
  const geometry::LatticeDomain& domain() const { return *domain_; }
  const lattice::Lattice& lattice() const { return *lattice_; }
  const rheology::LatticeScaling& scaling() const { return scaling_; }
  const boundary::PressureBoundarySet& boundaries() const { return *boundaries_; }
  lattice::DistributionField& field() { return field_; }
  const lattice::DistributionField& field() const { return field_; }
  const std::vector<double>& tau_field() const { return tau_; }

  long step_count() const { return step_; }
  double time() const { return step_ * scaling_.dt(); }
  const Diagnostics& diagnostics() const { return diag_; }
  const std::vector<Probe>& probes() const { return probes_; }

  void set_threads(int threads, int partitions = 0);
  int threads() const { return threads_; }
  std::size_t partition_count() const { return partitions_.size(); }

  /// Adds a monitored wall point; `position` moves to the nearest cut wall
  /// link within config.snap_distance lattice spacings.
  void add_probe(const std::string& name, const Eigen::Vector3d& position);

  void step();
  void advance(long steps);

  /// Macroscopic values at a fluid site, SI units.
  double density(std::size_t site) const;         // kg/m^3
  double pressure(std::size_t site) const;        // Pa, relative to the reference boundary
  Eigen::Vector3d velocity(std::size_t site) const;  // m/s
  /// Deviatoric stress from the moment of the current populations, Pa.
  Eigen::Matrix3d stress(std::size_t site) const;
  /// Relaxation time consistent with the current populations.
  double local_tau(std::size_t site) const;
  double shear_rate(std::size_t site) const;      // 1/s
  double viscosity(std::size_t site) const;       // Pa s

  double total_mass() const { return lattice::total_mass(field_); }

  /// Legacy VTK structured points: density, pressure, velocity, shear rate, viscosity.
  void write_snapshot(const std::filesystem::path& path) const;

  void write_checkpoint(const std::filesystem::path& path) const;
  void restore_checkpoint(const std::filesystem::path& path);

 private:
  void init(std::vector<boundary::PressureTrace> traces);
  void sample();
  void check_limits(const lattice::CollisionStats& stats);

  RunConfig config_;
  std::unique_ptr<geometry::LatticeDomain> domain_;
  std::unique_ptr<lattice::Lattice> lattice_;
  rheology::LatticeScaling scaling_;
  std::unique_ptr<boundary::PressureBoundarySet> boundaries_;
  lattice::DistributionField field_;
  std::vector<double> tau_;
  std::vector<lattice::Partition> partitions_;
  int threads_ = 1;
  long step_ = 0;
  int sample_every_ = 1;
  Diagnostics diag_;
  double wall_seconds_ = 0.0;
  std::vector<Probe> probes_;
};

struct RunResult {
  Diagnostics diagnostics;
  std::vector<wss::WssSignal> signals;
  std::vector<tbd::ThreeBandDiagram> diagrams;
  std::filesystem::path output_dir;
};

/// Full run: build the domain, step through all cycles, write artifacts.
/// Throws ConfigError, InstabilityError, or std::runtime_error for I/O.
RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& restore = {});

}  // namespace hemo::driver
