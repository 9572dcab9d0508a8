#include "hemo/wss.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "csv.hpp"

namespace hemo::wss {

Eigen::Matrix3d deviatoric_stress(const Eigen::Matrix3d& pi_neq, double tau,
                                  const rheology::LatticeScaling& scaling) {
  return (-(1.0 - 0.5 / tau) * scaling.stress_unit()) * traceless(pi_neq);
}

Eigen::Vector3d traction(const Eigen::Matrix3d& T, const Eigen::Vector3d& n) {
  if (!(std::abs(n.norm() - 1.0) <= 1e-9)) {
    throw std::invalid_argument("traction: normal is not a unit vector");
  }
  return T * n;
}

std::vector<double> WssSignal::window_values() const {
  return {S.begin() + window_begin, S.begin() + window_end};
}

std::vector<double> WssSignal::window_times() const {
  std::vector<double> t;
  for (std::size_t i = window_begin; i < window_end; ++i) t.push_back(samples[i].t);
  return t;
}

WssSignal signed_wss(std::vector<TractionSample> samples, const AnalysisWindow& window) {
  WssSignal sig;
  sig.samples = std::move(samples);
  const auto& s = sig.samples;
  std::size_t b = 0;
  while (b < s.size() && s[b].t < window.begin) ++b;
  std::size_t e = b;
  while (e < s.size() && s[e].t <= window.end) ++e;
  if (e - b < 2) throw std::invalid_argument("signed WSS: fewer than 2 samples in the window");
  sig.window_begin = b;
  sig.window_end = e;

  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (std::size_t i = b; i < e; ++i) sum += s[i].traction;
  sig.mean_traction = sum / static_cast<double>(e - b);

  sig.S.resize(s.size());
  bool all_zero = true;
  for (std::size_t i = b; i < e && all_zero; ++i) all_zero = s[i].traction.isZero(0.0);
  if (all_zero) {
    sig.zero_traction = true;
    std::fill(sig.S.begin(), sig.S.end(), 0.0);
    return sig;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mag = s[i].traction.norm();
    sig.S[i] = s[i].traction.dot(sig.mean_traction) < 0.0 ? -mag : mag;
  }
  return sig;
}

void write_wss_csv(const std::filesystem::path& path, const WssSignal& signal) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "time_s,tx_pa,ty_pa,tz_pa,S_pa\n" << std::setprecision(17);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const auto& smp = signal.samples[i];
    os << smp.t << ',' << smp.traction.x() << ',' << smp.traction.y() << ',' << smp.traction.z()
       << ',' << signal.S[i] << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

SignalSeries read_signal_csv(const std::filesystem::path& path) {
  auto table = io::read_csv(path, {"time_s", "S_pa"});
  return {std::move(table.columns[0]), std::move(table.columns[1])};
}

}  // namespace hemo::wss
