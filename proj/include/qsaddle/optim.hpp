#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsaddle/landscape.hpp"
#include "qsaddle/perturb.hpp"
#include "qsaddle/rng.hpp"
#include "qsaddle/schedule.hpp"

namespace qsaddle {

enum class EventKind { qs_call, nce_momentum_reset, nce_step, perturb_classical, sosp_certified };

std::string event_kind_name(EventKind kind);

struct Event {
  long long t = 0;
  EventKind kind = EventKind::qs_call;
  double payload = 0.0;  // qs_call: function decrease; sosp_certified: lambda_min
};

// Iterate history with per-step scalars always recorded; full points and
// momenta are kept when record_points is on (needed for window diagnostics).
struct Trajectory {
  std::vector<double> f_values;
  std::vector<double> grad_norms;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> momenta;  // accelerated variant only
  std::vector<double> energies;          // accelerated variant only
  std::vector<Event> events;
  Eigen::VectorXd final_x;
  bool certified = false;
  Eigen::VectorXd certified_x;

  std::size_t iterations() const { return f_values.empty() ? 0 : f_values.size() - 1; }
};

struct OptimOptions {
  bool early_stop = true;
  bool record_points = true;
  PerturbBackend backend = PerturbBackend::analytic;
  PdeOptions pde;
  double t_e = -1.0;       // < 0 uses params.script_T_prime
  long long max_iters = -1;  // < 0 uses the schedule budget
};

Eigen::VectorXd gd_step(const Landscape& f, const Eigen::VectorXd& x, double eta);

// Gradient descent with a uniform-ball kick whenever the gradient is small.
Trajectory pgd_classical(const Landscape& f, const Eigen::VectorXd& x0,
                         const ScheduleParams& params, double ball_radius, Rng& rng,
                         const OptimOptions& opts = {});

// Gradient descent with the wave-packet perturbation at small-gradient steps.
Trajectory pgd_qs(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                  Rng& rng, const OptimOptions& opts = {});

// Momentum reset / negative-curvature step; returns the new (x, v) with v = 0.
std::pair<Eigen::VectorXd, Eigen::VectorXd> nce(const Landscape& f, const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& v, double s);

// E = f(x) + |v|^2 / (2 eta'), the Lyapunov function of the accelerated steps.
double agd_hamiltonian(const Landscape& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                       double eta_prime);

// Accelerated variant: Nesterov steps, nonconvexity certificate, NCE, and the
// wave-packet perturbation at small-gradient steps.
Trajectory pagd_qs(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                   Rng& rng, const OptimOptions& opts = {});

// Bounded-error gradient oracle emulation: the returned gradient differs from
// the exact one by a uniform draw from the ball of radius bound().
struct NoisyGradientModel {
  double delta_q = 0.0;
  double ell = 1.0;
  int n = 1;
  double omega0 = 1.0;

  double bound() const;  // 400 n sqrt(delta_q ell) * omega0
};

Eigen::VectorXd noisy_gradient(const Landscape& f, const Eigen::VectorXd& x,
                               const NoisyGradientModel& model, Rng& rng);

// pgd_qs with every gradient (including the small-gradient trigger) replaced
// by the noisy oracle. delta_q admissibility for (delta, eps) is checked and
// warned about, not enforced.
Trajectory pgd_jordan(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                      const NoisyGradientModel& model, Rng& rng, const OptimOptions& opts = {});

struct SospCertificate {
  bool sosp = false;
  double grad_norm = 0.0;
  double lambda_min = 0.0;
};

// |grad f(x)| <= eps and lambda_min(hess f(x)) >= -sqrt(rho eps); falls back
// to finite differences of the gradient when no Hessian is available.
SospCertificate is_eps_sosp(const Landscape& f, const Eigen::VectorXd& x, double eps, double rho);

void trajectory_to_csv(const Trajectory& traj, const std::string& path);

}  // namespace qsaddle
