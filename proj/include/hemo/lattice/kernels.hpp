#pragma once

#include <stdexcept>

#include "hemo/lattice/velocity_set.hpp"

namespace hemo::lattice {

template <typename Scalar>
Scalar density(const Populations<Scalar>& f) {
  return f.sum();
}

/// Momentum density sum_k f_k c_k.
template <typename Scalar>
Vector3<Scalar> momentum(const Populations<Scalar>& f) {
  Vector3<Scalar> j = Vector3<Scalar>::Zero();
  for (int k = 1; k < kQ; ++k) {
    j[0] += f[k] * Scalar(kDirections[k][0]);
    j[1] += f[k] * Scalar(kDirections[k][1]);
    j[2] += f[k] * Scalar(kDirections[k][2]);
  }
  return j;
}

/// Second-order truncated Maxwellian
///   f_k^eq = w_k rho [1 + c.u/cs2 + (c.u)^2/(2 cs2^2) - u.u/(2 cs2)].
template <typename Scalar>
Populations<Scalar> equilibrium(Scalar rho, const Vector3<Scalar>& u) {
  using Set = D3Q15<Scalar>;
  const Scalar inv_cs2 = Scalar(1) / Set::cs2;
  const Scalar usq_term = Scalar(0.5) * inv_cs2 * u.squaredNorm();
  Populations<Scalar> feq;
  for (int k = 0; k < kQ; ++k) {
    const Scalar cu = Scalar(kDirections[k][0]) * u[0] + Scalar(kDirections[k][1]) * u[1] +
                      Scalar(kDirections[k][2]) * u[2];
    feq[k] = Set::weight(k) * rho *
             (Scalar(1) + cu * inv_cs2 + Scalar(0.5) * cu * cu * inv_cs2 * inv_cs2 - usq_term);
  }
  return feq;
}

/// Pi^neq_ij = sum_k (f_k - f_k^eq) c_ki c_kj.
template <typename Scalar>
Tensor3<Scalar> nonequilibrium_moment(const Populations<Scalar>& f,
                                      const Populations<Scalar>& feq) {
  Tensor3<Scalar> pi = Tensor3<Scalar>::Zero();
  for (int k = 1; k < kQ; ++k) {
    const Scalar fneq = f[k] - feq[k];
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        pi(i, j) += fneq * Scalar(kDirections[k][i] * kDirections[k][j]);
      }
    }
  }
  pi(1, 0) = pi(0, 1);
  pi(2, 0) = pi(0, 2);
  pi(2, 1) = pi(1, 2);
  return pi;
}

/// Same moment from the raw populations: sum_k f_k c_k c_k - rho (cs2 I + u u).
/// The D3Q15 equilibrium reproduces that second moment exactly, so this
/// avoids forming f - f^eq.
template <typename Scalar>
Tensor3<Scalar> nonequilibrium_moment(const Populations<Scalar>& f, Scalar rho,
                                      const Vector3<Scalar>& u) {
  // directions 7..14 are the (+-1, +-1, +-1) diagonals
  const Scalar d = f.template segment<8>(7).sum();
  const Scalar xy = f[7] + f[8] + f[9] + f[10] - f[11] - f[12] - f[13] - f[14];
  const Scalar xz = f[7] + f[8] - f[9] - f[10] + f[11] + f[12] - f[13] - f[14];
  const Scalar yz = f[7] + f[8] - f[9] - f[10] - f[11] - f[12] + f[13] + f[14];
  const Scalar p = rho * D3Q15<Scalar>::cs2;
  Tensor3<Scalar> pi;
  pi(0, 0) = f[1] + f[2] + d - p - rho * u[0] * u[0];
  pi(1, 1) = f[3] + f[4] + d - p - rho * u[1] * u[1];
  pi(2, 2) = f[5] + f[6] + d - p - rho * u[2] * u[2];
  pi(0, 1) = pi(1, 0) = xy - rho * u[0] * u[1];
  pi(0, 2) = pi(2, 0) = xz - rho * u[0] * u[2];
  pi(1, 2) = pi(2, 1) = yz - rho * u[1] * u[2];
  return pi;
}

/// BGK relaxation towards a precomputed equilibrium. No validation; hot-loop form.
template <typename Scalar>
Populations<Scalar> relax(const Populations<Scalar>& f, const Populations<Scalar>& feq,
                          Scalar tau) {
  const Scalar omega = Scalar(1) / tau;
  return f - omega * (f - feq);
}

/// LBGK collision f' = f - (f - f^eq(rho(f), u(f))) / tau. Requires tau > 1/2.
template <typename Scalar>
Populations<Scalar> collide(const Populations<Scalar>& f, Scalar tau) {
  if (!(tau > Scalar(0.5))) {
    throw std::invalid_argument("collide: relaxation time must exceed 1/2");
  }
  const Scalar rho = density(f);
  const Vector3<Scalar> u = momentum(f) / rho;
  return relax(f, equilibrium(rho, u), tau);
}

}  // namespace hemo::lattice
