#include "hemo/rheology.hpp"

#include <algorithm>
#include <sstream>

namespace hemo::rheology {

void Newtonian::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw RheologyError("newtonian: eta must be > 0");
}

double CarreauYasuda::viscosity(double gamma_dot) const {
  if (gamma_dot < kShearRateFloor) return eta0;
  const double x = std::pow(lambda * gamma_dot, a);
  return eta_inf + (eta0 - eta_inf) * std::pow(1.0 + x, (n - 1.0) / a);
}

double CarreauYasuda::viscosity_derivative(double gamma_dot) const {
  if (gamma_dot < kShearRateFloor) return 0.0;
  const double x = std::pow(lambda * gamma_dot, a);
  // d/dg (1 + x)^((n-1)/a) = (n - 1) (1 + x)^((n-1)/a - 1) x / g
  return (eta0 - eta_inf) * (n - 1.0) * std::pow(1.0 + x, (n - 1.0) / a - 1.0) * x / gamma_dot;
}

void CarreauYasuda::viscosity_and_derivative(double gamma_dot, double& v, double& dv) const {
  if (gamma_dot < kShearRateFloor) {
    v = eta0;
    dv = 0.0;
    return;
  }
  const double x = std::pow(lambda * gamma_dot, a);
  const double p = std::pow(1.0 + x, (n - 1.0) / a);
  v = eta_inf + (eta0 - eta_inf) * p;
  dv = (eta0 - eta_inf) * (n - 1.0) * p / (1.0 + x) * x / gamma_dot;
}

void CarreauYasuda::validate() const {
  std::ostringstream err;
  if (!(eta0 > 0.0)) err << "eta0 must be > 0; ";
  if (!(eta_inf > 0.0)) err << "eta_inf must be > 0; ";
  if (eta0 < eta_inf) err << "eta0 must be >= eta_inf; ";
  if (!(lambda > 0.0)) err << "lambda must be > 0; ";
  if (!(a > 0.0)) err << "a must be > 0; ";
  if (!(n > 0.0 && n < 1.0)) err << "n must lie in (0, 1); ";
  if (!err.str().empty()) throw RheologyError("carreau-yasuda: " + err.str());
}

std::string model_name(const RheologyModel& model) {
  return std::holds_alternative<Newtonian>(model) ? "newtonian" : "carreau_yasuda";
}

bool is_constant(const RheologyModel& model) {
  return std::visit([](const auto& m) { return m.min_viscosity() == m.max_viscosity(); }, model);
}

void validate(const RheologyModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

double viscosity(const RheologyModel& model, double gamma_dot) {
  if (!(gamma_dot >= 0.0)) throw RheologyError("viscosity: shear rate must be >= 0");
  return std::visit([gamma_dot](const auto& m) { return m.viscosity(gamma_dot); }, model);
}

LatticeScaling::LatticeScaling(double dt, double dx, double rho)
    : dt_(dt), dx_(dx), rho_(rho), cs_(dx / (std::sqrt(3.0) * dt)) {
  if (!(dt > 0.0) || !(dx > 0.0) || !(rho > 0.0)) {
    throw RheologyError("lattice scaling: dt, dx and rho must be > 0");
  }
}

double relaxation_time(double eta, const LatticeScaling& scaling) {
  return 0.5 + eta / (scaling.dt() * scaling.cs2() * scaling.rho());
}

double viscosity_from_tau(double tau, const LatticeScaling& scaling) {
  return (tau - 0.5) * scaling.dt() * scaling.cs2() * scaling.rho();
}

namespace {

double traceless_norm(const Eigen::Matrix3d& pi) {
  const double trace3 = pi.trace() / 3.0;
  Eigen::Matrix3d dev = pi;
  dev.diagonal().array() -= trace3;
  return dev.norm();
}

}  // namespace

double shear_rate_from_moment(const Eigen::Matrix3d& pi_neq, double rho, double tau,
                              const LatticeScaling& scaling) {
  // S = -Pi_dev / (2 rho cs2 tau) with cs2 = 1/3 in lattice units, per timestep.
  const double g = 3.0 / std::sqrt(2.0) * traceless_norm(pi_neq) / (rho * tau * scaling.dt());
  return g < kShearRateFloor ? 0.0 : g;
}

TauUpdate local_tau_update(const Eigen::Matrix3d& pi_neq, double rho, double tau_prev,
                           const RheologyModel& model, const LatticeScaling& scaling,
                           const TauSolverOptions& options) {
  if (is_constant(model)) {
    const double tau = relaxation_time(viscosity(model, 0.0), scaling);
    return {tau, shear_rate_from_moment(pi_neq, rho, tau, scaling), 0, true};
  }

  const double c = scaling.dt() * scaling.cs2() * scaling.rho();
  // gamma_dot(tau) = A / tau
  const double A = 3.0 / std::sqrt(2.0) * traceless_norm(pi_neq) / (rho * scaling.dt());
  auto eval = [&](double g, double& eta, double& deta) {
    std::visit(
        [&](const auto& m) { m.viscosity_and_derivative(g, eta, deta); },
        model);
  };

  double lo = 0.0, hi = 0.0;
  std::visit(
      [&](const auto& m) {
        lo = 0.5 + m.min_viscosity() / c;
        hi = 0.5 + m.max_viscosity() / c;
      },
      model);

  if (A / hi < kShearRateFloor) {
    return {0.5 + viscosity(model, 0.0) / c, 0.0, 1, true};
  }

  double tau = std::clamp(tau_prev, lo, hi);
  double eta = 0.0, deta = 0.0, g = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    g = A / tau;
    if (g < kShearRateFloor) g = 0.0;
    eval(g, eta, deta);
    const double eta_tau = (tau - 0.5) * c;
    if (std::abs(eta - eta_tau) <= options.rel_tolerance * eta) {
      const double tau_new = 0.5 + eta / c;
      return {tau_new, A / tau_new, it, true};
    }
    const double h = tau - (0.5 + eta / c);
    if (h < 0.0) {
      lo = tau;
    } else {
      hi = tau;
    }
    const double dh = 1.0 + deta * A / (tau * tau * c);
    double next = tau - h / dh;
    if (!(dh > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    tau = next;
  }
  g = A / tau;
  eval(g < kShearRateFloor ? 0.0 : g, eta, deta);
  const double tau_new = 0.5 + eta / c;
  return {tau_new, A / tau_new, options.max_iterations, false};
}

}  // namespace hemo::rheology
