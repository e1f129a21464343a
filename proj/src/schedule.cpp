#include "qsaddle/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace qsaddle {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw std::invalid_argument(std::string("schedule_from: ") + name + " must be positive");
  }
}

void check_close(double a, double b, const char* what) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  if (std::abs(a - b) > 1e-9 * scale) {
    throw std::logic_error(std::string("ScheduleParams: ") + what + " identity violated");
  }
}

}  // namespace

void ScheduleParams::validate(bool skip_overridden_checks) const {
  if (!skip_overridden_checks) {
    check_close(eta, 1.0 / ell, "eta = 1/ell");
    check_close(M, std::min({r0 / C_r, 1.0}), "M = min(r0/C_r, 1)");
  }
  check_close(eta_prime, 1.0 / (4.0 * ell), "eta' = 1/(4 ell)");
  check_close(script_F_prime, (2.0 / 81.0) * std::sqrt(eps * eps * eps / rho),
              "F' = (2/81) sqrt(eps^3/rho)");
  check_close(kappa, ell / std::sqrt(rho * eps), "kappa = ell/sqrt(rho eps)");
  check_close(theta, 1.0 / (4.0 * std::sqrt(kappa)), "theta = 1/(4 sqrt(kappa))");
  check_close(gamma, theta * theta * ell, "gamma = theta^2/eta");
  check_close(s, gamma / (4.0 * rho), "s = gamma/(4 rho)");
  if (M > 1.0 + 1e-12 && !skip_overridden_checks) {
    throw std::logic_error("ScheduleParams: M exceeds the unit cap");
  }
}

ScheduleParams schedule_from(double ell, double rho, double eps, double delta, double f_gap,
                             int n, const ScheduleOverrides& overrides,
                             std::optional<double> domain_radius) {
  require_positive(ell, "ell");
  require_positive(rho, "rho");
  require_positive(eps, "eps");
  require_positive(delta, "delta");
  require_positive(f_gap, "f_gap");
  if (n < 1) throw std::invalid_argument("schedule_from: n must be positive");

  ScheduleParams p;
  p.ell = ell;
  p.rho = rho;
  p.eps = eps;
  p.delta = delta;
  p.f_gap = f_gap;
  p.n = n;
  if (overrides.C_r) p.C_r = *overrides.C_r;
  if (overrides.C0) p.C0 = *overrides.C0;
  if (overrides.c_A) p.c_A = *overrides.c_A;
  if (overrides.alpha_bourgain) p.alpha_bourgain = *overrides.alpha_bourgain;

  const double sqrt_rho_eps = std::sqrt(rho * eps);
  const double sqrt_eps3_rho = std::sqrt(eps * eps * eps / rho);

  p.script_F_prime = (2.0 / 81.0) * sqrt_eps3_rho;
  p.delta0 = overrides.delta0 ? *overrides.delta0 : 2.0 / (81.0 * f_gap) * sqrt_eps3_rho;
  p.eta = overrides.eta ? *overrides.eta : 1.0 / ell;
  p.eta_prime = 1.0 / (4.0 * ell);

  if (overrides.script_T_prime) {
    p.script_T_prime = *overrides.script_T_prime;
  } else {
    p.script_T_prime = 8.0 / std::pow(rho * eps, 0.25) *
                       std::log(ell / (p.delta0 * sqrt_rho_eps) *
                                (n + 2.0 * std::log(3.0 / p.delta0)));
  }

  if (overrides.r0) {
    p.r0 = *overrides.r0;
  } else {
    const double tp = p.script_T_prime;
    const double denom = std::pow(static_cast<double>(n), 1.5) +
                         2.0 * p.C0 * n * ell * std::pow(std::log(tp), p.alpha_bourgain);
    const double inner = (p.delta0 / 3.0) / denom;
    p.r0 = 4.0 * std::pow(p.C_r, 3) / (9.0 * std::pow(tp, 4)) * inner * inner;
  }

  if (overrides.M) {
    p.M = *overrides.M;
  } else {
    p.M = std::min(p.r0 / p.C_r, 1.0);
    if (domain_radius) p.M = std::min(p.M, *domain_radius);
  }

  p.kappa = ell / sqrt_rho_eps;
  p.theta = 1.0 / (4.0 * std::sqrt(p.kappa));
  p.gamma = p.theta * p.theta * ell;
  p.s = p.gamma / (4.0 * rho);
  p.script_T = std::sqrt(p.kappa) * p.c_A;
  p.script_E = sqrt_eps3_rho / std::pow(p.c_A, 7);

  if (overrides.T) {
    p.T = *overrides.T;
    p.T_pagd = *overrides.T;
  } else {
    p.T = static_cast<long long>(
        std::ceil(4.0 * std::max(f_gap / p.script_F_prime, f_gap / (p.eta * eps * eps))));
    p.T_pagd = static_cast<long long>(
        std::ceil(3.0 * std::max(f_gap / p.script_F_prime, f_gap * p.script_T / p.script_E)));
  }

  p.validate(overrides.any());
  return p;
}

ScheduleOverrides overrides_from_config(const Config& cfg) {
  ScheduleOverrides o;
  if (cfg.has("r0")) o.r0 = cfg.get_double("r0");
  if (cfg.has("M")) o.M = cfg.get_double("M");
  if (cfg.has("eta")) o.eta = cfg.get_double("eta");
  if (cfg.has("delta0")) o.delta0 = cfg.get_double("delta0");
  if (cfg.has("C_r")) o.C_r = cfg.get_double("C_r");
  if (cfg.has("C0")) o.C0 = cfg.get_double("C0");
  if (cfg.has("c_A")) o.c_A = cfg.get_double("c_A");
  if (cfg.has("T")) o.T = cfg.get_int("T");
  if (cfg.has("t_e") && cfg.get_string("t_e") != "schedule") {
    o.script_T_prime = cfg.get_double("t_e");
  }
  return o;
}

}  // namespace qsaddle
