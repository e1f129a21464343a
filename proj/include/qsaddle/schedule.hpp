#pragma once

#include <optional>

#include "qsaddle/config.hpp"

namespace qsaddle {

// Every tunable of the perturbed-descent algorithms, populated from the
// closed-form schedule given (ell, rho, eps, delta, f_gap, n) and optionally
// overridden for experiment-parity runs.
struct ScheduleParams {
  // Problem data.
  double ell = 0.0;
  double rho = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double f_gap = 0.0;
  int n = 0;

  // Derived schedule.
  double delta0 = 0.0;          // per-call failure budget
  double eta = 0.0;             // 1/ell
  double eta_prime = 0.0;       // 1/(4 ell)
  double script_T_prime = 0.0;  // wave evolution time
  double script_F_prime = 0.0;  // guaranteed decrease per perturbation
  double r0 = 0.0;              // initial packet spread
  double M = 0.0;               // simulation half-width
  double kappa = 0.0;           // ell / sqrt(rho eps)
  double theta = 0.0;           // 1 / (4 sqrt(kappa))
  double gamma = 0.0;           // theta^2 / eta
  double s = 0.0;               // gamma / (4 rho)
  double script_T = 0.0;        // sqrt(kappa) * c_A
  double script_E = 0.0;        // sqrt(eps^3/rho) / c_A^7
  long long T = 0;              // gradient-descent iteration budget
  long long T_pagd = 0;         // accelerated variant budget

  // Absolute constants left free in the analysis; config-overridable.
  double C_r = 0.1;
  double C0 = 1.0;
  double c_A = 4.0;
  double alpha_bourgain = 1.0;

  // Checks the mutual identities between the non-overridden fields; throws
  // std::logic_error on violation.
  void validate(bool skip_overridden_checks = false) const;
};

struct ScheduleOverrides {
  std::optional<double> delta0;
  std::optional<double> eta;
  std::optional<double> r0;
  std::optional<double> M;
  std::optional<double> script_T_prime;
  std::optional<double> C_r;
  std::optional<double> C0;
  std::optional<double> c_A;
  std::optional<double> alpha_bourgain;
  std::optional<long long> T;

  bool any() const {
    return delta0 || eta || r0 || M || script_T_prime || C_r || C0 || c_A || alpha_bourgain || T;
  }
};

// domain_radius (when finite) participates in the half-width cap
// M = min(r0 / C_r, domain_radius, 1).
ScheduleParams schedule_from(double ell, double rho, double eps, double delta, double f_gap,
                             int n, const ScheduleOverrides& overrides = {},
                             std::optional<double> domain_radius = std::nullopt);

// Reads overrides from config keys (r0, t_e, M, eta, delta0, C_r, C0, c_A, T).
ScheduleOverrides overrides_from_config(const Config& cfg);

}  // namespace qsaddle
