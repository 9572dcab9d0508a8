#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace hemo::lattice {

/// Number of discrete velocities in the D3Q15 set.
inline constexpr int kQ = 15;

/// D3Q15 directions: rest, six axis neighbours, eight body diagonals.
/// Directions are laid out so that `k` and `kOpposite[k]` are adjacent pairs.
inline constexpr std::array<std::array<int, 3>, kQ> kDirections{{
    {0, 0, 0},
    {1, 0, 0},
    {-1, 0, 0},
    {0, 1, 0},
    {0, -1, 0},
    {0, 0, 1},
    {0, 0, -1},
    {1, 1, 1},
    {-1, -1, -1},
    {1, 1, -1},
    {-1, -1, 1},
    {1, -1, 1},
    {-1, 1, -1},
    {-1, 1, 1},
    {1, -1, -1},
}};

inline constexpr std::array<int, kQ> kOpposite{0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13};

template <typename Scalar>
using Populations = Eigen::Matrix<Scalar, kQ, 1>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Tensor3 = Eigen::Matrix<Scalar, 3, 3>;

/// Quadrature data for D3Q15 in lattice units (c = dx/dt = 1).
template <typename Scalar>
struct D3Q15 {
  static constexpr Scalar cs2 = Scalar(1) / Scalar(3);

  static constexpr Scalar weight(int k) {
    if (k == 0) return Scalar(2) / Scalar(9);
    if (k <= 6) return Scalar(1) / Scalar(9);
    return Scalar(1) / Scalar(72);
  }

  static Vector3<Scalar> direction(int k) {
    return Vector3<Scalar>(Scalar(kDirections[k][0]), Scalar(kDirections[k][1]),
                           Scalar(kDirections[k][2]));
  }

  static Populations<Scalar> weights() {
    Populations<Scalar> w;
    for (int k = 0; k < kQ; ++k) w[k] = weight(k);
    return w;
  }
};

/// Bitmask over the 15 directions (bit k set means direction k).
using DirectionMask = std::uint16_t;

constexpr bool has_direction(DirectionMask mask, int k) { return (mask >> k) & 1u; }

}  // namespace hemo::lattice
