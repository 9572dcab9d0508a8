#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hemo/driver/simulation.hpp"

namespace hemo::driver {

namespace {

void write_metadata(const std::filesystem::path& path, const RunConfig& config,
                    const ValidationReport& report, const Simulation* sim,
                    const RunResult& result, const std::string& status) {
  nlohmann::ordered_json j;
  j["status"] = status;
  j["configuration"] = config.source_text;
  j["derived"] = {{"cs_phys_m_s", report.cs_phys},
                  {"tau", report.tau},
                  {"steps", report.steps},
                  {"sample_every", config.effective_sample_every()},
                  {"predicted_mach_bound", report.predicted_mach}};
  if (report.tau_max) j["derived"]["tau_eta0"] = *report.tau_max;
  j["rheology"] = rheology::model_name(config.rheology);
  j["design"] = {
      {"collision", "D3Q15 LBGK, per-site relaxation time"},
      {"wall_boundary", "halfway bounce-back"},
      {"pressure_boundary",
       "non-equilibrium extrapolation replacing all populations of inlet/outlet-adjacent sites; "
       "velocity and non-equilibrium part from the interior neighbour best aligned with the "
       "inward normal"},
      {"pressure_reference", config.reference},
      {"pressure_location", "inlet/outlet-adjacent sites, half a spacing inside the cap plane"},
      {"carreau_yasuda_tau", "safeguarded Newton solve of tau = tau(eta(gamma_dot(tau)))"},
      {"stress_location", "wall-adjacent fluid site, no extrapolation"},
      {"wall_normal", "fluid to solid"},
      {"mean_traction_window", "final cycle"},
      {"sign_tie", "zero dot product counts as positive"},
      {"band_rule", "S+ if S > sigma, S- if S < -sigma, otherwise neutral"},
      {"interval_endpoints", tbd::to_string(config.endpoints)},
      {"sigma_grid",
       std::to_string(config.sigma_points) + " points linear from 0 to " +
           (config.sigma_max ? std::to_string(*config.sigma_max) + " Pa" : "1.05 max|S|")}};
  if (sim) {
    const auto& d = sim->diagnostics();
    j["diagnostics"] = {{"sites", d.sites},
                        {"steps_completed", sim->step_count()},
                        {"max_mach", d.max_mach},
                        {"max_density_variation", d.max_density_variation},
                        {"tau_nonconverged", d.tau_nonconverged},
                        {"seconds_per_step", d.seconds_per_step},
                        {"threads", sim->threads()},
                        {"partitions", sim->partition_count()}};
    nlohmann::ordered_json probes = nlohmann::ordered_json::array();
    for (const auto& p : sim->probes()) {
      probes.push_back({{"name", p.name},
                        {"position_m", {p.point.position.x(), p.point.position.y(),
                                        p.point.position.z()}},
                        {"normal", {p.point.unit_normal.x(), p.point.unit_normal.y(),
                                    p.point.unit_normal.z()}}});
    }
    j["probes"] = probes;
  }
  nlohmann::ordered_json sig = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.signals.size(); ++i) {
    const auto& s = result.signals[i];
    const auto h = tbd::healthy_threshold(result.diagrams[i]);
    sig.push_back({{"name", s.id},
                   {"mean_traction_pa", {s.mean_traction.x(), s.mean_traction.y(),
                                         s.mean_traction.z()}},
                   {"zero_traction_warning", s.zero_traction},
                   {"healthy_threshold", h.describe()}});
  }
  j["signals"] = sig;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

}  // namespace

RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& restore) {
  const auto report = validate(config);
  if (!report.ok()) throw ConfigError(report.errors);

  RunResult result;
  result.output_dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + config.output_dir.string());

  Simulation sim(config, build_domain(config));
  for (const auto& s : config.samples) sim.add_probe(s.name, s.position);
  if (restore) sim.restore_checkpoint(*restore);

  const long total = config.total_steps();
  const double steps_per_cycle = config.cycle_period / config.dt;
  const long snapshot_every =
      config.snapshots_per_cycle > 0
          ? std::max(1L, std::lround(steps_per_cycle / config.snapshots_per_cycle))
          : 0;
  const auto dir = config.output_dir;
  if (snapshot_every > 0) std::filesystem::create_directories(dir / "snapshots");

  std::ofstream diag(dir / "diagnostics.csv", restore ? std::ios::app : std::ios::trunc);
  if (!diag) throw std::runtime_error("cannot open " + (dir / "diagnostics.csv").string());
  if (!restore) {
    diag << "step,time_s,mach,density_variation,max_mach,max_density_variation,tau_nonconverged,"
            "total_mass\n";
  }
  diag << std::setprecision(10);

  auto snapshot = [&] {
    std::ostringstream name;
    name << "snapshot_" << std::setw(8) << std::setfill('0') << sim.step_count() << ".vtk";
    sim.write_snapshot(dir / "snapshots" / name.str());
  };

  try {
    if (snapshot_every > 0 && sim.step_count() == 0) snapshot();
    while (sim.step_count() < total) {
      sim.step();
      const long n = sim.step_count();
      if (n % config.report_every == 0 || n == total) {
        const auto& d = sim.diagnostics();
        diag << n << ',' << sim.time() << ',' << d.mach << ',' << d.density_variation << ','
             << d.max_mach << ',' << d.max_density_variation << ',' << d.tau_nonconverged << ','
             << sim.total_mass() << '\n';
      }
      if (snapshot_every > 0 && n % snapshot_every == 0) snapshot();
      if (config.checkpoint_every > 0 && n % config.checkpoint_every == 0) {
        sim.write_checkpoint(dir / "checkpoint.bin");
      }
    }
  } catch (const InstabilityError&) {
    diag.flush();
    result.diagnostics = sim.diagnostics();
    write_metadata(dir / "metadata.json", config, report, &sim, result, "aborted: instability");
    throw;
  }

  const double t_end = total * config.dt;
  wss::AnalysisWindow window;
  if (t_end >= config.cycle_period) window.begin = t_end - config.cycle_period - 0.5 * config.dt;
  for (const auto& p : sim.probes()) {
    auto signal = wss::signed_wss(p.samples, window);
    signal.id = p.name;
    signal.point = p.point;
    wss::write_wss_csv(dir / ("wss_" + p.name + ".csv"), signal);
    const auto values = signal.window_values();
    auto diagram = tbd::sweep(values, tbd::default_sigma_grid(values, config.sigma_points,
                                                              config.sigma_max),
                              config.endpoints, p.name);
    tbd::write_tbd_csv(dir / ("tbd_" + p.name + ".csv"), diagram);
    result.signals.push_back(std::move(signal));
    result.diagrams.push_back(std::move(diagram));
  }
  result.diagnostics = sim.diagnostics();
  write_metadata(dir / "metadata.json", config, report, &sim, result, "completed");
  return result;
}

}  // namespace hemo::driver
