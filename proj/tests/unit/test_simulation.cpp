#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "hemo/driver/simulation.hpp"

using namespace hemo;
using namespace hemo::driver;

namespace {

constexpr double kHeight = 2e-3;
constexpr double kEta = 3.5e-3;
constexpr double kRho = 1000.0;

// Plane channel of H lattice spacings across, length 3H, periodic depth of one spacing.
RunConfig channel(int H, double tau, rheology::RheologyModel model = rheology::Newtonian{kEta}) {
  RunConfig c;
  c.dx = kHeight / H;
  c.dt = (tau - 0.5) / 3.0 * c.dx * c.dx / (kEta / kRho);
  c.rho = kRho;
  c.rheology = model;
  c.geometry.kind = GeometryConfig::Kind::Channel;
  c.geometry.length = 3 * kHeight;
  c.geometry.height = kHeight;
  c.cycle_period = 1.0;
  c.steps = 1;
  c.traces = {{"inlet0", {}, "constant", 0.0, 0.0, 0.0}, {"outlet0", {}, "constant", 0.0, 0.0, 0.0}};
  return c;
}

RunConfig steady_channel(int H, double tau, double dp) {
  auto c = channel(H, tau);
  c.traces[0].mean = dp;
  return c;
}

lattice::Vector3<double> lattice_velocity(const Simulation& sim, std::size_t s) {
  const lattice::Populations<double> f = sim.field().at(s);
  return lattice::momentum(f) / lattice::density(f);
}

// Fluid sites of the column at x index i, bottom to top.
std::vector<std::int32_t> column(const Simulation& sim, int i) {
  std::vector<std::int32_t> out;
  const auto& d = sim.domain();
  for (int j = 0; j < d.dims()[1]; ++j) {
    const auto s = sim.lattice().site_of(d.index(i, j, 0));
    if (s >= 0) out.push_back(s);
  }
  return out;
}

void run_to_steady(Simulation& sim) {
  const auto col = column(sim, sim.domain().dims()[0] / 2);
  double prev = 0.0;
  for (int it = 0; it < 2000; ++it) {
    sim.advance(100);
    double um = 0.0;
    for (auto s : col) um = std::max(um, sim.velocity(s).x());
    if (std::abs(um - prev) < 1e-10 * um) return;
    prev = um;
  }
  FAIL("channel did not converge");
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hemo_unit_sim";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("fluid at rest with equal pressures stays at rest") {
  Simulation sim(channel(10, 0.8), build_domain(channel(10, 0.8)));
  const double m0 = sim.total_mass();
  sim.advance(500);
  for (std::size_t s = 0; s < sim.lattice().size(); ++s) CHECK(sim.velocity(s).norm() < 1e-15);
  CHECK(sim.total_mass() == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("an initial flow decays with equal pressures") {
  const auto c = channel(10, 0.8);
  Simulation sim(c, build_domain(c));
  lattice::initialise_equilibrium(sim.field(), 1.0, lattice::Vector3<double>(0.02, 0.0, 0.0));
  auto peak = [&] {
    double m = 0.0;
    for (std::size_t s = 0; s < sim.lattice().size(); ++s) m = std::max(m, lattice_velocity(sim, s).norm());
    return m;
  };
  const double u0 = peak();
  sim.advance(4000);
  const double u1 = peak();
  sim.advance(4000);
  const double u2 = peak();
  CHECK(u1 < 1e-2 * u0);
  CHECK(u2 < 1e-4 * u0);
  CHECK(u2 < u1);
}

TEST_CASE("steady channel: halfway wall and stress moment") {
  const int H = 10;
  const auto c = steady_channel(H, 0.8, 0.1);
  Simulation sim(c, build_domain(c));
  run_to_steady(sim);
  const auto& d = sim.domain();
  const int i = d.dims()[0] / 2;
  const auto col = column(sim, i);
  REQUIRE(col.size() == H);

  // least-squares parabola through the whole column; its roots are the effective walls
  Eigen::MatrixXd A(col.size(), 3);
  Eigen::VectorXd b(col.size());
  for (std::size_t r = 0; r < col.size(); ++r) {
    const double y = d.position(sim.lattice().grid_index(col[r])).y() / c.dx;
    A.row(r) << y * y, y, 1.0;
    b[r] = sim.velocity(col[r]).x();
  }
  const Eigen::Vector3d p = A.colPivHouseholderQr().solve(b);
  const double disc = std::sqrt(p[1] * p[1] - 4 * p[0] * p[2]);
  const double r0 = (-p[1] + disc) / (2 * p[0]), r1 = (-p[1] - disc) / (2 * p[0]);
  const double lo = std::min(r0, r1), hi = std::max(r0, r1);
  CHECK(std::abs(lo - 0.0) < 0.05);
  CHECK(std::abs(hi - H) < 0.05);
  CHECK(d.position(sim.lattice().grid_index(col.front())).y() == doctest::Approx(0.5 * c.dx));

  // non-equilibrium moment against -2 rho cs^2 tau S from finite differences
  const double tau = sim.tau_field()[0];
  double smax = 0.0;
  for (std::size_t r = 1; r + 1 < col.size(); ++r) {
    const double s = 0.5 * (lattice_velocity(sim, col[r + 1]).x() - lattice_velocity(sim, col[r - 1]).x()) / 2.0;
    smax = std::max(smax, std::abs(s));
  }
  int checked = 0;
  for (std::size_t r = 1; r + 1 < col.size(); ++r) {
    const double sxy =
        0.5 * (lattice_velocity(sim, col[r + 1]).x() - lattice_velocity(sim, col[r - 1]).x()) / 2.0;
    if (std::abs(sxy) < 0.1 * smax) continue;
    const lattice::Populations<double> f = sim.field().at(col[r]);
    const double rho = lattice::density(f);
    const auto pi = lattice::nonequilibrium_moment<double>(f, rho, lattice::momentum(f) / rho);
    const double expected = -2.0 * rho * lattice::D3Q15<double>::cs2 * tau * sxy;
    CHECK(pi(0, 1) == doctest::Approx(expected).epsilon(0.02));
    ++checked;
  }
  CHECK(checked >= 4);
}

TEST_CASE("low-Womersley oscillation follows the pressure drop") {
  const int H = 10;
  const double tau = 0.8;
  auto c = channel(H, tau);
  const long period_steps = 20000;
  c.cycle_period = period_steps * c.dt;
  const double amplitude = 0.05;
  auto domain = build_domain(c);
  std::vector<boundary::PressureTrace> traces(domain.boundaries().size());
  for (std::size_t b = 0; b < traces.size(); ++b) {
    auto spec = boundary::sine_waveform(0.0, domain.boundaries()[b].kind == geometry::BoundaryKind::Inlet
                                                 ? amplitude : 0.0, c.cycle_period);
    spec.samples = 4096;
    traces[b] = boundary::generate_waveform(spec);
  }
  Simulation sim(c, std::move(domain), std::move(traces));
  sim.advance(period_steps);

  const auto col = column(sim, sim.domain().dims()[0] / 2);
  const double omega = 2 * std::numbers::pi / c.cycle_period;
  std::vector<double> q;
  std::vector<Eigen::RowVector3d> rows;
  for (long n = 0; n < period_steps; n += 50) {
    double flow = 0.0;
    for (auto s : col) flow += sim.velocity(s).x();
    rows.emplace_back(std::sin(omega * sim.time()), std::cos(omega * sim.time()), 1.0);
    q.push_back(flow);
    sim.advance(50);
  }
  Eigen::MatrixXd A(rows.size(), 3);
  Eigen::VectorXd b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(r) = rows[r];
    b[r] = q[r];
  }
  const Eigen::Vector3d fit = A.colPivHouseholderQr().solve(b);
  const double lag = std::atan2(-fit[1], fit[0]) * 180.0 / std::numbers::pi;

  // plane Womersley flow: Q ~ (1 - tanh(kh)/(kh)) / (i omega), k = sqrt(i omega / nu)
  using cd = std::complex<double>;
  const double nu = kEta / kRho, h = 0.5 * kHeight;
  const cd kh = std::sqrt(cd(0.0, omega / nu)) * h;
  const cd response = (1.0 - std::tanh(kh) / kh) / cd(0.0, omega);
  const double analytic = -std::arg(response) * 180.0 / std::numbers::pi;

  MESSAGE("flow lag " << lag << " deg, analytic " << analytic << " deg");
  CHECK(std::abs(lag) < 5.0);
  CHECK(std::abs(lag - analytic) < 1.5);
}

TEST_CASE("partition count does not change the result") {
  auto c = channel(10, 0.8, rheology::CarreauYasuda{});
  c.dt = (0.52 - 0.5) / 3.0 * c.dx * c.dx / (3.5e-3 / kRho);
  c.traces[0].preset = "sine";
  c.traces[0].amplitude = 0.5;
  c.cycle_period = 400 * c.dt;
  Simulation one(c, build_domain(c));
  one.set_threads(1, 1);
  Simulation many(c, build_domain(c));
  many.set_threads(1, 7);
  CHECK(many.partition_count() == 7);
  one.advance(300);
  many.advance(300);
  CHECK(same_bits(one.field().current(), many.field().current()));
  CHECK(std::memcmp(one.tau_field().data(), many.tau_field().data(),
                    one.tau_field().size() * sizeof(double)) == 0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  auto c = channel(10, 0.8, rheology::CarreauYasuda{});
  c.dt = (0.52 - 0.5) / 3.0 * c.dx * c.dx / (3.5e-3 / kRho);
  c.traces[0].preset = "sine";
  c.traces[0].amplitude = 0.5;
  c.cycle_period = 400 * c.dt;
  c.sample_every = 3;
  const Eigen::Vector3d wall_point(3e-3, 0.0, 0.0);

  Simulation whole(c, build_domain(c));
  whole.add_probe("bottom", wall_point);
  whole.advance(400);

  Simulation first(c, build_domain(c));
  first.add_probe("bottom", wall_point);
  first.advance(170);
  const auto path = scratch("ck.bin");
  first.write_checkpoint(path);

  Simulation second(c, build_domain(c));
  second.add_probe("bottom", wall_point);
  second.restore_checkpoint(path);
  CHECK(second.step_count() == 170);
  second.advance(230);

  CHECK(same_bits(whole.field().current(), second.field().current()));
  CHECK(std::memcmp(whole.tau_field().data(), second.tau_field().data(),
                    whole.tau_field().size() * sizeof(double)) == 0);
  const auto& a = whole.probes()[0].samples;
  const auto& b = second.probes()[0].samples;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].traction == b[i].traction);
  }

  Simulation other(c, build_domain(c));
  CHECK_THROWS(other.restore_checkpoint(path));  // probe list differs
  std::ofstream(scratch("junk.bin")) << "not a checkpoint";
  CHECK_THROWS(second.restore_checkpoint(scratch("junk.bin")));
}

TEST_CASE("excessive driving aborts with an instability error") {
  auto c = steady_channel(10, 0.8, 1e3);
  Simulation sim(c, build_domain(c));
  try {
    sim.advance(5000);
    FAIL("expected InstabilityError");
  } catch (const InstabilityError& e) {
    CHECK(e.step() >= 0);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("probes snap to the wall and reject remote points") {
  const auto c = channel(10, 0.8);
  Simulation sim(c, build_domain(c));
  sim.add_probe("top", Eigen::Vector3d(3e-3, kHeight + 1e-4, 0.0));
  const auto& p = sim.probes().front();
  CHECK(p.point.unit_normal.isApprox(Eigen::Vector3d::UnitY(), 1e-12));
  CHECK(p.site >= 0);
  CHECK_THROWS_AS(sim.add_probe("far", Eigen::Vector3d(3e-3, 1e-3, 0.0)), geometry::GeometryError);
}

TEST_CASE("run writes its artifacts") {
  auto c = steady_channel(10, 0.8, 0.05);
  c.steps.reset();
  c.cycles = 2;
  c.cycle_period = 600 * c.dt;
  c.traces[0].preset = "sine";
  c.traces[0].amplitude = 0.05;
  c.samples = {{"bottom", Eigen::Vector3d(3e-3, 0.0, 0.0)}};
  c.snapshots_per_cycle = 2;
  c.output_dir = scratch("run");
  std::filesystem::remove_all(c.output_dir);
  c.source_text = "# test";
  const auto result = run(c);
  REQUIRE(result.signals.size() == 1);
  REQUIRE(result.diagrams.size() == 1);
  CHECK(result.signals[0].window_values().size() >= 500);
  for (const char* f : {"diagnostics.csv", "metadata.json", "wss_bottom.csv", "tbd_bottom.csv"}) {
    CHECK(std::filesystem::exists(c.output_dir / f));
  }
  CHECK(std::filesystem::exists(c.output_dir / "snapshots"));
  std::ifstream is(c.output_dir / "metadata.json");
  const auto meta = nlohmann::json::parse(is);
  CHECK(meta["status"] == "completed");
  CHECK(meta["configuration"] == "# test");
  CHECK(meta["diagnostics"]["steps_completed"] == 1200);

  auto bad = c;
  bad.cycles = 0;
  CHECK_THROWS_AS(run(bad), ConfigError);

  // the same driving with a coarse time step overshoots the density limit at once
  auto wild = c;
  wild.dt = 1.0;
  wild.output_dir = scratch("wild");
  CHECK_THROWS_AS(run(wild), InstabilityError);
  std::ifstream ws(wild.output_dir / "metadata.json");
  CHECK(nlohmann::json::parse(ws)["status"] == "aborted: instability");
}

}  // TEST_SUITE
