#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemo/lattice/lattice.hpp"
#include "hemo/rheology.hpp"

namespace hemo::boundary {

class BoundaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Periodic pressure record for one inlet or outlet.
struct PressureTrace {
  std::vector<double> times;      // s, strictly increasing, within [0, period)
  std::vector<double> pressures;  // Pa
  double period = 0.91;           // s

  void validate() const;
};

/// Linear interpolation, periodic in `period`. Between the last sample and
/// the period end the value runs back toward the first sample.
double sample_pressure(const PressureTrace& trace, double t);

/// CSV with header "time_s,pressure_pa".
PressureTrace read_trace_csv(const std::filesystem::path& path, double period);
void write_trace_csv(const std::filesystem::path& path, const PressureTrace& trace);

struct Harmonic {
  double amplitude = 0.0;  // Pa
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

/// P(t) = mean + sum A sin(2 pi f t + phase)
struct WaveformSpec {
  double mean = 0.0;
  std::vector<Harmonic> harmonics;
  double period = 0.91;
  int samples = 256;

  void validate() const;
  double evaluate(double t) const;
};

PressureTrace generate_waveform(const WaveformSpec& spec);

/// Cardiac-like pulse: systolic upstroke after ~0.06 s, peak near 0.2 s,
/// dicrotic notch, diastolic decay. `pulse` is the peak-to-peak amplitude and
/// `delay` shifts the whole wave later in time.
WaveformSpec cardiac_waveform(double mean, double pulse, double period = 0.91, double delay = 0.0);

/// Single sinusoid of amplitude `amplitude` about `mean`.
WaveformSpec sine_waveform(double mean, double amplitude, double period, double phase = 0.0);

/// Names accepted by waveform_preset(): "cardiac", "sine", "constant".
WaveformSpec waveform_preset(const std::string& name, double mean, double amplitude,
                             double period, double delay = 0.0);

/// rho = 1 + (P - P_ref) / (cs_phys^2 rho_phys), lattice units.
double density_from_pressure(double pressure, double reference,
                             const rheology::LatticeScaling& scaling);
double pressure_from_density(double rho, double reference,
                             const rheology::LatticeScaling& scaling);

/// Non-equilibrium extrapolation: equilibrium at (rho_target, u_interior)
/// plus the non-equilibrium part of the interior populations.
lattice::Populations<double> pressure_bc_populations(
    const lattice::Populations<double>& interior, double rho_target);

/// Pressure boundaries over all inlet/outlet-adjacent sites of a lattice.
class PressureBoundarySet {
 public:
  struct Site {
    std::int32_t site;
    std::int32_t interior;  // source of velocity and non-equilibrium part
    int boundary;           // index into domain.boundaries()
  };

  /// `traces[b]` drives domain.boundaries()[b]. `reference` is the boundary
  /// whose pressure defines rho = 1 (or -1 for an absolute gauge at 0 Pa).
  PressureBoundarySet(const lattice::Lattice& lattice, std::vector<PressureTrace> traces,
                      const rheology::LatticeScaling& scaling, int reference);

  const std::vector<Site>& sites() const { return sites_; }
  int reference() const { return reference_; }
  const std::vector<PressureTrace>& traces() const { return traces_; }

  /// Target density for every boundary at time t.
  std::vector<double> target_densities(double t) const;

  /// Overwrites boundary sites of `buffer` (site-major populations). Throws
  /// BoundaryError when a target density is not positive.
  void apply(std::span<double> buffer, double t) const;

 private:
  std::vector<Site> sites_;
  std::vector<PressureTrace> traces_;
  rheology::LatticeScaling scaling_;
  int reference_;
};

}  // namespace hemo::boundary
