#include "hemo/tbd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hemo::tbd {

std::string to_string(Endpoints e) { return e == Endpoints::Circular ? "circular" : "open"; }

BandDecomposition band_decompose(std::span<const double> S, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("band decomposition: sigma must be >= 0");
  BandDecomposition d;
  d.sigma = sigma;
  d.band.resize(S.size());
  d.s_plus.assign(S.size(), 0.0);
  d.s_zero.assign(S.size(), 0.0);
  d.s_minus.assign(S.size(), 0.0);
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] > sigma) {
      d.band[i] = Band::Plus;
      d.s_plus[i] = S[i];
    } else if (S[i] < -sigma) {
      d.band[i] = Band::Minus;
      d.s_minus[i] = S[i];
    } else {
      d.band[i] = Band::Zero;
      d.s_zero[i] = S[i];
    }
  }
  return d;
}

namespace {

void bump(Counts& c, Band b, int by) {
  switch (b) {
    case Band::Plus: c.plus += by; break;
    case Band::Zero: c.zero += by; break;
    case Band::Minus: c.minus += by; break;
  }
}

}  // namespace

Counts count_intervals(const BandDecomposition& d, Endpoints endpoints) {
  const auto& b = d.band;
  if (b.size() < 2) throw std::invalid_argument("count intervals: at least 2 samples required");
  Counts c;
  int runs = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i == 0 || b[i] != b[i - 1]) {
      bump(c, b[i], 1);
      ++runs;
    }
  }
  if (endpoints == Endpoints::Circular && runs > 1 && b.front() == b.back()) bump(c, b.front(), -1);
  return c;
}

Counts count_intervals(std::span<const double> S, double sigma, Endpoints endpoints) {
  return count_intervals(band_decompose(S, sigma), endpoints);
}

std::vector<double> default_sigma_grid(std::span<const double> S, int points,
                                       std::optional<double> sigma_max) {
  if (points < 2) throw std::invalid_argument("sigma grid: at least 2 points");
  double top;
  if (sigma_max) {
    top = *sigma_max;
  } else {
    double m = 0.0;
    for (double v : S) m = std::max(m, std::abs(v));
    top = m > 0.0 ? 1.05 * m : 1.0;
  }
  if (!(top > 0.0)) throw std::invalid_argument("sigma grid: sigma_max must be > 0");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = top * i / (points - 1);
  return grid;
}

ThreeBandDiagram sweep(std::span<const double> S, std::vector<double> sigmas, Endpoints endpoints,
                       std::string signal_id) {
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > sigmas[i - 1])) throw std::invalid_argument("sweep: grid must be ascending");
  }
  ThreeBandDiagram d;
  d.signal_id = std::move(signal_id);
  d.endpoints = endpoints;
  d.counts.reserve(sigmas.size());
  for (double s : sigmas) d.counts.push_back(count_intervals(S, s, endpoints));
  d.sigmas = std::move(sigmas);
  return d;
}

std::string HealthyThreshold::describe() const {
  std::ostringstream os;
  switch (status) {
    case ThresholdStatus::Found: os << std::setprecision(9) << sigma << " Pa"; break;
    case ThresholdStatus::NonOscillatory: os << "criterion unsatisfiable (non-oscillatory)"; break;
    case ThresholdStatus::NoneOnGrid: os << "none on grid"; break;
  }
  return os.str();
}

HealthyThreshold healthy_threshold(const ThreeBandDiagram& d) {
  bool any_plus = false, any_minus = false;
  for (const auto& c : d.counts) {
    any_plus |= c.plus > 0;
    any_minus |= c.minus > 0;
  }
  for (std::size_t i = d.sigmas.size(); i-- > 0;) {
    const auto& c = d.counts[i];
    if (c.plus > 0 && c.zero > 0 && c.minus > 0) return {ThresholdStatus::Found, d.sigmas[i]};
  }
  return {any_plus && any_minus ? ThresholdStatus::NoneOnGrid : ThresholdStatus::NonOscillatory,
          0.0};
}

void write_tbd_csv(std::ostream& os, const ThreeBandDiagram& d) {
  os << "sigma_pa,n_plus,n_zero,n_minus\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.sigmas.size(); ++i) {
    os << d.sigmas[i] << ',' << d.counts[i].plus << ',' << d.counts[i].zero << ','
       << d.counts[i].minus << '\n';
  }
  os << "# healthy_threshold " << healthy_threshold(d).describe() << "; endpoints "
     << to_string(d.endpoints) << "; neutral band includes |S| = sigma";
  if (!d.signal_id.empty()) os << "; signal " << d.signal_id;
  os << '\n';
}

void write_tbd_csv(const std::filesystem::path& path, const ThreeBandDiagram& d) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_tbd_csv(os, d);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace hemo::tbd
