#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hemo::tbd {

enum class Band : std::int8_t { Minus = -1, Zero = 0, Plus = 1 };

/// How runs touching the ends of the record are counted.
///  Circular: the record is one period of a periodic signal, so a run at the
///            end and a run at the start in the same band form one interval.
///  Open:     each end run is an interval of its own.
enum class Endpoints { Circular, Open };

std::string to_string(Endpoints e);

/// Per-sample band membership. S+ where S > sigma, S- where S < -sigma,
/// neutral otherwise (a sample exactly at +-sigma is neutral).
struct BandDecomposition {
  double sigma = 0.0;
  std::vector<Band> band;
  std::vector<double> s_plus;   // S where S+ is active, 0 elsewhere
  std::vector<double> s_zero;
  std::vector<double> s_minus;
};

BandDecomposition band_decompose(std::span<const double> S, double sigma);

struct Counts {
  int plus = 0;
  int zero = 0;
  int minus = 0;
  bool operator==(const Counts&) const = default;
};

Counts count_intervals(const BandDecomposition& d, Endpoints endpoints = Endpoints::Circular);
Counts count_intervals(std::span<const double> S, double sigma,
                       Endpoints endpoints = Endpoints::Circular);

struct ThreeBandDiagram {
  std::string signal_id;
  Endpoints endpoints = Endpoints::Circular;
  std::vector<double> sigmas;  // ascending, Pa
  std::vector<Counts> counts;
};

/// `points` thresholds spaced linearly over [0, sigma_max]; sigma_max
/// defaults to 1.05 max|S| (1 Pa for an identically zero signal).
std::vector<double> default_sigma_grid(std::span<const double> S, int points = 200,
                                       std::optional<double> sigma_max = std::nullopt);

ThreeBandDiagram sweep(std::span<const double> S, std::vector<double> sigmas,
                       Endpoints endpoints = Endpoints::Circular, std::string signal_id = {});

enum class ThresholdStatus {
  Found,           // some grid sigma has all three bands
  NonOscillatory,  // one sign never occurs: the criterion cannot be met
  NoneOnGrid,      // both signs occur but no grid point shows all three bands
};

struct HealthyThreshold {
  ThresholdStatus status = ThresholdStatus::NoneOnGrid;
  double sigma = 0.0;  // Pa, meaningful when status == Found

  std::string describe() const;
};

/// Largest grid sigma with N+ > 0, N0 > 0 and N- > 0.
HealthyThreshold healthy_threshold(const ThreeBandDiagram& diagram);

/// CSV with header "sigma_pa,n_plus,n_zero,n_minus" followed by a
/// "# healthy_threshold ..." summary line.
void write_tbd_csv(const std::filesystem::path& path, const ThreeBandDiagram& diagram);
void write_tbd_csv(std::ostream& os, const ThreeBandDiagram& diagram);

}  // namespace hemo::tbd
