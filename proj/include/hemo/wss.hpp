#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hemo/geometry/sampling.hpp"
#include "hemo/rheology.hpp"

namespace hemo::wss {

/// Traceless part of a symmetric tensor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> traceless(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m - (m.trace() / Scalar(3)) * Eigen::Matrix<Scalar, 3, 3>::Identity();
}

/// Deviatoric stress in Pa from the non-equilibrium moment of a site:
/// T = -(1 - 1/(2 tau)) traceless(Pi_neq), scaled by rho_phys dx^2 / dt^2.
Eigen::Matrix3d deviatoric_stress(const Eigen::Matrix3d& pi_neq, double tau,
                                  const rheology::LatticeScaling& scaling);

/// t_i = T_ij n_j. Throws std::invalid_argument unless |n| = 1 within 1e-9.
Eigen::Vector3d traction(const Eigen::Matrix3d& T, const Eigen::Vector3d& n);

struct TractionSample {
  double t = 0.0;                                        // s
  Eigen::Vector3d traction = Eigen::Vector3d::Zero();    // Pa
};

/// Time range [begin, end] used for the mean traction.
struct AnalysisWindow {
  double begin = -std::numeric_limits<double>::infinity();
  double end = std::numeric_limits<double>::infinity();
};

struct WssSignal {
  std::string id;
  geometry::WallSamplePoint point;
  std::vector<TractionSample> samples;
  Eigen::Vector3d mean_traction = Eigen::Vector3d::Zero();
  std::vector<double> S;  // Pa, one per sample
  std::size_t window_begin = 0;  // samples [window_begin, window_end) lie in the window
  std::size_t window_end = 0;
  bool zero_traction = false;    // every traction in the window is zero; S is identically 0

  /// S restricted to the analysis window.
  std::vector<double> window_values() const;
  std::vector<double> window_times() const;
};

/// S(t) = sgn(t . tbar) |t| with tbar the mean over the window; a zero dot
/// product counts as positive. Requires at least 2 samples in the window.
WssSignal signed_wss(std::vector<TractionSample> samples, const AnalysisWindow& window = {});

/// CSV with header "time_s,tx_pa,ty_pa,tz_pa,S_pa".
void write_wss_csv(const std::filesystem::path& path, const WssSignal& signal);

/// Reads "time_s" and "S_pa" columns from any CSV that has them.
struct SignalSeries {
  std::vector<double> times;
  std::vector<double> values;
};
SignalSeries read_signal_csv(const std::filesystem::path& path);

}  // namespace hemo::wss
