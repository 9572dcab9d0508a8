#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace hemo::rheology {

class RheologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shear rates below this are treated as exactly zero (1/s).
inline constexpr double kShearRateFloor = 1e-12;

struct Newtonian {
  double eta = 3.5e-3;  // Pa s

  double viscosity(double /*gamma_dot*/) const { return eta; }
  double viscosity_derivative(double /*gamma_dot*/) const { return 0.0; }
  void viscosity_and_derivative(double /*gamma_dot*/, double& v, double& dv) const {
    v = eta;
    dv = 0.0;
  }
  double min_viscosity() const { return eta; }
  double max_viscosity() const { return eta; }
  void validate() const;
};

/// eta(g) = eta_inf + (eta0 - eta_inf) (1 + (lambda g)^a)^((n - 1) / a)
struct CarreauYasuda {
  double eta0 = 0.16;      // Pa s
  double eta_inf = 0.0035; // Pa s
  double lambda = 8.2;     // s
  double a = 0.64;
  double n = 0.2128;

  double viscosity(double gamma_dot) const;
  double viscosity_derivative(double gamma_dot) const;
  void viscosity_and_derivative(double gamma_dot, double& v, double& dv) const;
  double min_viscosity() const { return eta_inf; }
  double max_viscosity() const { return eta0; }
  void validate() const;
};

/// Adding a generalized Newtonian law means adding an alternative with the
/// same member functions as the two above.
using RheologyModel = std::variant<Newtonian, CarreauYasuda>;

std::string model_name(const RheologyModel& model);
bool is_constant(const RheologyModel& model);
void validate(const RheologyModel& model);

/// Dynamic viscosity in Pa s. Throws for negative or non-finite shear rate.
double viscosity(const RheologyModel& model, double gamma_dot);

/// Physical-to-lattice scaling. cs_phys = dx / (sqrt(3) dt).
class LatticeScaling {
 public:
  LatticeScaling(double dt, double dx, double rho);

  double dt() const { return dt_; }
  double dx() const { return dx_; }
  double rho() const { return rho_; }
  double cs() const { return cs_; }
  double cs2() const { return cs_ * cs_; }
  /// Pa per lattice stress unit (rho_phys dx^2 / dt^2).
  double stress_unit() const { return rho_ * dx_ * dx_ / (dt_ * dt_); }
  /// m/s per lattice velocity unit.
  double velocity_unit() const { return dx_ / dt_; }

 private:
  double dt_;
  double dx_;
  double rho_;
  double cs_;
};

/// tau = 1/2 + eta / (dt cs^2 rho), in timesteps.
double relaxation_time(double eta, const LatticeScaling& scaling);

/// Inverse of relaxation_time.
double viscosity_from_tau(double tau, const LatticeScaling& scaling);

/// gamma_dot = sqrt(2 S_ij S_ij) for a symmetric shear-rate tensor S.
template <typename Scalar>
Scalar shear_rate(const Eigen::Matrix<Scalar, 3, 3>& S) {
  using std::sqrt;
  return sqrt(Scalar(2) * S.cwiseProduct(S).sum());
}

struct TauUpdate {
  double tau = 0.0;
  double gamma_dot = 0.0;  // 1/s, consistent with the returned tau
  int iterations = 0;
  bool converged = true;
};

struct TauSolverOptions {
  double rel_tolerance = 1e-6;  // on eta
  int max_iterations = 10;
};

/// Per-site relaxation time consistent with the local stress.
///
/// The shear rate recovered from Pi^neq depends on tau, and tau depends on
/// eta(gamma_dot). The root of tau = tau(eta(gamma_dot(tau))) is bracketed by
/// the relaxation times of the model's viscosity bounds and is found with a
/// safeguarded Newton iteration seeded from `tau_prev`.
TauUpdate local_tau_update(const Eigen::Matrix3d& pi_neq, double rho, double tau_prev,
                           const RheologyModel& model, const LatticeScaling& scaling,
                           const TauSolverOptions& options = {});

/// Shear rate (1/s) implied by Pi^neq at relaxation time tau.
double shear_rate_from_moment(const Eigen::Matrix3d& pi_neq, double rho, double tau,
                              const LatticeScaling& scaling);

}  // namespace hemo::rheology
