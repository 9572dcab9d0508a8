#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hemo/boundary.hpp"
#include "hemo/driver/simulation.hpp"
#include "hemo/geometry/sampling.hpp"
#include "hemo/tbd.hpp"
#include "hemo/wss.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInstability = 3;
constexpr int kExitIo = 4;

using namespace hemo;

void apply_env(driver::RunConfig& c) {
  if (const char* dir = std::getenv("HEMO_OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
  if (const char* t = std::getenv("HEMO_THREADS"); t && *t) {
    try {
      c.threads = std::stoi(t);
    } catch (const std::exception&) {
      throw driver::ConfigError({std::string("HEMO_THREADS is not an integer: ") + t});
    }
  }
}

int cmd_validate(const std::string& config_path) {
  auto config = driver::load_config(config_path);
  apply_env(config);
  const auto report = driver::validate(config);
  std::cout << report.summary();
  return report.ok() ? 0 : kExitConfig;
}

int cmd_voxelize(const std::string& config_path, const std::string& output) {
  const auto config = driver::load_config(config_path);
  const auto domain = driver::build_domain(config);
  geometry::write_domain(output, domain);
  std::cout << "dims " << domain.dims().transpose() << "\n"
            << "fluid sites " << domain.fluid_count() << "\n"
            << "wall sites " << domain.count(geometry::SiteClass::Wall) << "\n"
            << "inlet sites " << domain.count(geometry::SiteClass::Inlet) << "\n"
            << "outlet sites " << domain.count(geometry::SiteClass::Outlet) << "\n"
            << "components " << geometry::fluid_components(domain) << "\n"
            << "euler characteristic " << geometry::euler_characteristic(domain) << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& restore, int threads,
            const std::string& output) {
  auto config = driver::load_config(config_path);
  apply_env(config);
  if (threads > 0) config.threads = threads;
  if (!output.empty()) config.output_dir = output;
  const auto result =
      driver::run(config, restore.empty() ? std::nullopt : std::optional<std::filesystem::path>(restore));
  const auto& d = result.diagnostics;
  std::cout << "sites " << d.sites << "\n"
            << "max Mach " << d.max_mach << "\n"
            << "max density variation " << d.max_density_variation << "\n"
            << "tau non-converged " << d.tau_nonconverged << "\n"
            << "seconds per step " << d.seconds_per_step << "\n";
  for (std::size_t i = 0; i < result.signals.size(); ++i) {
    std::cout << "healthy threshold [" << result.signals[i].id
              << "] " << tbd::healthy_threshold(result.diagrams[i]).describe() << "\n";
  }
  std::cout << "output " << result.output_dir.string() << "\n";
  return 0;
}

int cmd_tbd(const std::string& input, std::optional<double> sigma_max, int steps,
            const std::string& output, const std::string& endpoints, double t_begin) {
  const auto series = wss::read_signal_csv(input);
  std::vector<double> values;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] >= t_begin) values.push_back(series.values[i]);
  }
  if (values.size() < 2) throw driver::ConfigError({"tbd: fewer than 2 samples to analyse"});
  const auto ep = endpoints == "open" ? tbd::Endpoints::Open : tbd::Endpoints::Circular;
  const auto diagram =
      tbd::sweep(values, tbd::default_sigma_grid(values, steps, sigma_max), ep, input);
  if (output.empty()) {
    tbd::write_tbd_csv(std::cout, diagram);
  } else {
    tbd::write_tbd_csv(output, diagram);
    std::cout << "healthy threshold " << tbd::healthy_threshold(diagram).describe() << "\n";
  }
  return 0;
}

int cmd_waveform(const std::string& preset, double mean, double amplitude, double period,
                 double delay, int samples, const std::string& output) {
  auto spec = boundary::waveform_preset(preset, mean, amplitude, period, delay);
  spec.samples = samples;
  boundary::write_trace_csv(output, boundary::generate_waveform(spec));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice-Boltzmann hemodynamics with three-band WSS analysis"};
  app.require_subcommand(1);

  std::string config, output, restore, input, preset = "cardiac", endpoints = "circular";
  int threads = 0, sigma_steps = 200, samples = 256;
  double sigma_max = 0.0, mean = 0.0, amplitude = 1000.0, period = 0.91, delay = 0.0,
         t_begin = -1e300;

  auto* validate = app.add_subcommand("validate", "check a configuration and print derived values");
  validate->add_option("config", config, "configuration file")->required();

  auto* voxelize = app.add_subcommand("voxelize", "build the lattice domain and write a voxel dump");
  voxelize->add_option("config", config, "configuration file")->required();
  voxelize->add_option("-o,--output", output, "voxel file")->required();

  auto* run = app.add_subcommand("run", "run a simulation");
  run->add_option("config", config, "configuration file")->required();
  run->add_option("--restore", restore, "checkpoint to resume from");
  run->add_option("--threads", threads, "worker threads (1 = reference mode)");
  run->add_option("-o,--output", output, "output directory");

  auto* tbd_cmd = app.add_subcommand("tbd", "three-band diagram of a WSS signal");
  tbd_cmd->add_option("--input", input, "CSV with time_s and S_pa columns")->required();
  auto* smax = tbd_cmd->add_option("--sigma-max", sigma_max, "largest threshold, Pa");
  tbd_cmd->add_option("--sigma-steps", sigma_steps, "number of thresholds")
      ->check(CLI::Range(2, 1000000));
  tbd_cmd->add_option("-o,--output", output, "output CSV (default: stdout)");
  tbd_cmd->add_option("--endpoints", endpoints, "circular or open")
      ->check(CLI::IsMember({"circular", "open"}));
  tbd_cmd->add_option("--t-begin", t_begin, "ignore samples before this time, s");

  auto* wave = app.add_subcommand("waveform", "write a pressure trace CSV from a preset");
  wave->add_option("--preset", preset, "cardiac, sine or constant")
      ->check(CLI::IsMember({"cardiac", "sine", "constant"}));
  wave->add_option("--mean", mean, "mean pressure, Pa");
  wave->add_option("--amplitude", amplitude, "peak-to-peak (cardiac) or amplitude (sine), Pa");
  wave->add_option("--period", period, "s");
  wave->add_option("--delay", delay, "s");
  wave->add_option("--samples", samples, "samples per period")->check(CLI::Range(128, 10000000));
  wave->add_option("-o,--output", output, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(config);
    if (*voxelize) return cmd_voxelize(config, output);
    if (*run) return cmd_run(config, restore, threads, output);
    if (*tbd_cmd) {
      return cmd_tbd(input, *smax ? std::optional<double>(sigma_max) : std::nullopt, sigma_steps,
                     output, endpoints, t_begin);
    }
    if (*wave) return cmd_waveform(preset, mean, amplitude, period, delay, samples, output);
  } catch (const driver::ConfigError& e) {
    std::cerr << "configuration error:\n" << e.what() << "\n";
    return kExitConfig;
  } catch (const geometry::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rheology::RheologyError& e) {
    std::cerr << "rheology error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const boundary::BoundaryError& e) {
    std::cerr << "boundary error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const driver::InstabilityError& e) {
    std::cerr << e.what() << "\n";
    return kExitInstability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
