#include "hemo/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "csv.hpp"

namespace hemo::boundary {

using lattice::kDirections;
using lattice::kOpposite;
using lattice::kQ;
using lattice::Populations;

void PressureTrace::validate() const {
  if (times.size() != pressures.size()) throw BoundaryError("trace: times/pressures size mismatch");
  if (times.size() < 2) throw BoundaryError("trace: at least 2 samples required");
  if (!(period > 0.0)) throw BoundaryError("trace: period must be > 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(pressures[i])) {
      throw BoundaryError("trace: non-finite sample");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw BoundaryError("trace: times must be strictly increasing");
    }
  }
  if (times.back() - times.front() >= period) {
    throw BoundaryError("trace: samples span more than one period");
  }
}

double sample_pressure(const PressureTrace& trace, double t) {
  const auto& ts = trace.times;
  const auto& ps = trace.pressures;
  const double T = trace.period;
  double x = std::fmod(t - ts.front(), T);
  if (x < 0.0) x += T;
  x += ts.front();
  const auto it = std::upper_bound(ts.begin(), ts.end(), x);
  if (it == ts.end()) {
    // wrap from the last sample to the first sample one period later
    const double t0 = ts.back(), t1 = ts.front() + T;
    return ps.back() + (ps.front() - ps.back()) * (x - t0) / (t1 - t0);
  }
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  if (i == 0) return ps.front();
  if (x == ts[i - 1]) return ps[i - 1];
  return ps[i - 1] + (ps[i] - ps[i - 1]) * (x - ts[i - 1]) / (ts[i] - ts[i - 1]);
}

PressureTrace read_trace_csv(const std::filesystem::path& path, double period) {
  const auto table = io::read_csv(path, {"time_s", "pressure_pa"});
  PressureTrace trace;
  trace.period = period;
  trace.times = table.columns[0];
  trace.pressures = table.columns[1];
  try {
    trace.validate();
  } catch (const BoundaryError& e) {
    throw BoundaryError(path.string() + ": " + e.what());
  }
  return trace;
}

void write_trace_csv(const std::filesystem::path& path, const PressureTrace& trace) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "time_s,pressure_pa\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    os << trace.times[i] << ',' << trace.pressures[i] << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void WaveformSpec::validate() const {
  if (!(period > 0.0)) throw BoundaryError("waveform: period must be > 0");
  if (samples < 128) throw BoundaryError("waveform: at least 128 samples per period");
  for (const auto& h : harmonics) {
    const double cycles = h.frequency * period;
    if (std::abs(cycles - std::round(cycles)) > 1e-9) {
      throw BoundaryError("waveform: harmonic frequency is not a multiple of 1/period");
    }
  }
}

double WaveformSpec::evaluate(double t) const {
  double p = mean;
  for (const auto& h : harmonics) {
    p += h.amplitude * std::sin(2.0 * std::numbers::pi * h.frequency * t + h.phase);
  }
  return p;
}

PressureTrace generate_waveform(const WaveformSpec& spec) {
  spec.validate();
  PressureTrace trace;
  trace.period = spec.period;
  trace.times.resize(spec.samples);
  trace.pressures.resize(spec.samples);
  for (int i = 0; i < spec.samples; ++i) {
    const double t = spec.period * i / spec.samples;
    trace.times[i] = t;
    trace.pressures[i] = spec.evaluate(t);
  }
  return trace;
}

WaveformSpec cardiac_waveform(double mean, double pulse, double period, double delay) {
  // Fourier fit of a unit peak-to-peak pulse on a 0.91 s cycle, zero mean.
  static constexpr double shape[8][2] = {
      {0.33925278739732267, 0.021274637680718911},  {0.20320235661254948, -1.1060475707557984},
      {0.12544354390211318, 4.1149445822710993},    {0.060625457664443182, 2.6463907951713521},
      {0.018204817850836538, -0.10200546568319191}, {0.017675004687534947, 3.8377370253923377},
      {0.0073516846123724824, 3.8251578286721601},  {0.014886582520155621, 3.1434985029415903}};
  WaveformSpec spec;
  spec.mean = mean;
  spec.period = period;
  for (int k = 1; k <= 8; ++k) {
    const double f = k / period;
    // time is scaled with the period so the pulse keeps its shape
    const double phase = shape[k - 1][1] - 2.0 * std::numbers::pi * f * delay;
    spec.harmonics.push_back({pulse * shape[k - 1][0], f, phase});
  }
  return spec;
}

WaveformSpec sine_waveform(double mean, double amplitude, double period, double phase) {
  WaveformSpec spec;
  spec.mean = mean;
  spec.period = period;
  if (amplitude != 0.0) spec.harmonics.push_back({amplitude, 1.0 / period, phase});
  return spec;
}

WaveformSpec waveform_preset(const std::string& name, double mean, double amplitude,
                             double period, double delay) {
  if (name == "cardiac") return cardiac_waveform(mean, amplitude, period, delay);
  if (name == "sine") {
    return sine_waveform(mean, amplitude, period, -2.0 * std::numbers::pi * delay / period);
  }
  if (name == "constant") return sine_waveform(mean, 0.0, period);
  throw BoundaryError("unknown waveform preset '" + name + "'");
}

double density_from_pressure(double pressure, double reference,
                             const rheology::LatticeScaling& scaling) {
  return 1.0 + (pressure - reference) / (scaling.cs2() * scaling.rho());
}

double pressure_from_density(double rho, double reference,
                             const rheology::LatticeScaling& scaling) {
  return reference + (rho - 1.0) * scaling.cs2() * scaling.rho();
}

Populations<double> pressure_bc_populations(const Populations<double>& interior,
                                            double rho_target) {
  if (!(rho_target > 0.0)) throw BoundaryError("pressure boundary: target density <= 0");
  const double rho = lattice::density(interior);
  const lattice::Vector3<double> u = lattice::momentum(interior) / rho;
  return lattice::equilibrium(rho_target, u) + (interior - lattice::equilibrium(rho, u));
}

PressureBoundarySet::PressureBoundarySet(const lattice::Lattice& lat,
                                         std::vector<PressureTrace> traces,
                                         const rheology::LatticeScaling& scaling, int reference)
    : traces_(std::move(traces)), scaling_(scaling), reference_(reference) {
  const auto& domain = lat.domain();
  const auto& planes = domain.boundaries();
  if (traces_.size() != planes.size()) {
    throw BoundaryError("pressure boundaries: expected " + std::to_string(planes.size()) +
                        " traces, got " + std::to_string(traces_.size()));
  }
  if (reference_ >= static_cast<int>(planes.size())) {
    throw BoundaryError("pressure boundaries: reference boundary out of range");
  }
  for (const auto& t : traces_) t.validate();

  for (std::size_t s = 0; s < lat.size(); ++s) {
    const std::size_t g = lat.grid_index(s);
    if (domain.iolet_cuts(g) == 0) continue;
    const int b = domain.iolet_id(g);
    const Eigen::Vector3d n = planes[b].inward_normal;
    std::int32_t best = -1;
    double best_score = -2.0;
    bool best_interior = false;
    for (int k = 1; k < kQ; ++k) {
      const std::int32_t nb = lat.source(s, kOpposite[k]);  // x + c_k
      if (nb < 0) continue;
      const Eigen::Vector3d c(kDirections[k][0], kDirections[k][1], kDirections[k][2]);
      const double score = c.dot(n) / c.norm();
      if (score <= 0.0) continue;
      const bool interior = domain.iolet_cuts(lat.grid_index(nb)) == 0;
      if ((interior && !best_interior) || (interior == best_interior && score > best_score)) {
        best = nb;
        best_score = score;
        best_interior = interior;
      }
    }
    if (best < 0) {
      throw BoundaryError("pressure boundary: site " + std::to_string(s) + " at " +
                          planes[b].name() + " has no fluid neighbour along the inward normal");
    }
    sites_.push_back({static_cast<std::int32_t>(s), best, b});
  }
}

std::vector<double> PressureBoundarySet::target_densities(double t) const {
  const double ref = reference_ >= 0 ? sample_pressure(traces_[reference_], t) : 0.0;
  std::vector<double> rho(traces_.size());
  for (std::size_t b = 0; b < traces_.size(); ++b) {
    rho[b] = density_from_pressure(sample_pressure(traces_[b], t), ref, scaling_);
  }
  return rho;
}

void PressureBoundarySet::apply(std::span<double> buffer, double t) const {
  const auto rho = target_densities(t);
  for (std::size_t b = 0; b < rho.size(); ++b) {
    if (!(rho[b] > 0.0)) {
      std::ostringstream os;
      os << "pressure boundary " << b << ": target density " << rho[b] << " <= 0 at t = " << t
         << " s";
      throw BoundaryError(os.str());
    }
  }
  // New values go to a scratch array first so an interior neighbour that is
  // itself a boundary site is read before it is overwritten.
  std::vector<Populations<double>> fresh(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const Eigen::Map<const Populations<double>> f(buffer.data() + sites_[i].interior * kQ);
    fresh[i] = pressure_bc_populations(f, rho[sites_[i].boundary]);
  }
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    Eigen::Map<Populations<double>>(buffer.data() + sites_[i].site * kQ) = fresh[i];
  }
}

}  // namespace hemo::boundary
