#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemo/geometry/shapes.hpp"
#include "hemo/rheology.hpp"
#include "hemo/tbd.hpp"

namespace hemo::driver {

/// Aggregated configuration problems, one per line in what().
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct GeometryConfig {
  enum class Kind { Channel, Cylinder, Bifurcation, Mesh, Voxel };
  Kind kind = Kind::Channel;
  // channel / cylinder
  double length = 0.0;
  double height = 0.0;
  double depth = 0.0;  // channel extent along the periodic z axis; defaults to dx
  double radius = 0.0;
  geometry::BifurcationSpec bifurcation;
  // mesh
  std::filesystem::path mesh;
  std::filesystem::path caps;
  double mesh_scale = 1.0;
  // voxel dump
  std::filesystem::path voxel_file;
};

/// Pressure source for one inlet or outlet.
struct TraceConfig {
  std::string boundary;  // "inlet0", "outlet1", ...
  std::filesystem::path file;
  std::string preset;    // used when file is empty
  double mean = 0.0;      // Pa
  double amplitude = 0.0; // Pa
  double delay = 0.0;     // s
};

struct SamplePointConfig {
  std::string name;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m
};

struct RunConfig {
  GeometryConfig geometry;
  double dx = 0.0;      // m
  double dt = 0.0;      // s
  double rho = 1000.0;  // kg/m^3
  rheology::RheologyModel rheology = rheology::Newtonian{};
  rheology::TauSolverOptions tau_solver;
  std::vector<TraceConfig> traces;
  std::string reference = "outlet0";  // boundary anchoring rho = 1, or "none"
  int cycles = 0;
  double cycle_period = 0.91;  // s
  std::optional<long> steps;   // overrides cycles * period / dt
  std::vector<SamplePointConfig> samples;
  double snap_distance = 4.0;  // dx; sample points move to the nearest cut wall link within this
  std::filesystem::path output_dir = "output";
  int sample_every = 0;         // steps; 0 = at least 500 samples per cycle
  int snapshots_per_cycle = 20; // 0 disables snapshots
  long checkpoint_every = 0;    // steps; 0 disables checkpoints
  int report_every = 100;       // steps between diagnostics rows
  int threads = 1;
  int partitions = 0;           // 0 = one per thread
  double max_mach = 0.35;
  double max_density_variation = 0.025;
  int sigma_points = 200;
  std::optional<double> sigma_max;
  tbd::Endpoints endpoints = tbd::Endpoints::Circular;
  std::string source_text;      // verbatim configuration, echoed into metadata

  long total_steps() const;
  int effective_sample_every() const;
};

/// INI-style text: [section] headers, key = value lines, '#' or ';' comments.
/// Relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double cs_phys = 0.0;           // m/s
  double tau = 0.0;               // Newtonian tau, or tau at eta_inf
  std::optional<double> tau_max;  // tau at eta0 for shear-thinning models
  double predicted_mach = 0.0;    // bound from the largest pressure difference
  double memory_bytes = 0.0;      // upper estimate from the bounding box
  long steps = 0;

  bool ok() const { return errors.empty(); }
  std::string summary() const;
};

/// Checks a configuration and reports derived quantities. Never throws.
ValidationReport validate(const RunConfig& config);

}  // namespace hemo::driver
