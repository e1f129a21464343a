#include "qsaddle/optim.hpp"

#include <cmath>
#include <iostream>

#include "qsaddle/csv.hpp"

namespace qsaddle {
namespace {

double lambda_min_of(const Mat& h, bool diagonal_hint) {
  if (diagonal_hint || h.isDiagonal(0.0)) return h.diagonal().minCoeff();
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues().minCoeff();
}

Mat finite_difference_hessian(const Landscape& f, const Vec& x) {
  const double h = 1e-5;
  Mat out(f.dim, f.dim);
  for (int j = 0; j < f.dim; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    out.col(j) = (gradient(f, xp) - gradient(f, xm)) / (2.0 * h);
  }
  return 0.5 * (out + out.transpose());
}

struct Recorder {
  Trajectory traj;
  bool record_points;
  bool accelerated;

  void push(const Landscape& f, const Vec& x, double grad_norm, const Vec* v, double eta_prime) {
    traj.f_values.push_back(evaluate(f, x));
    traj.grad_norms.push_back(grad_norm);
    if (record_points) traj.points.push_back(x);
    if (accelerated && v != nullptr) {
      if (record_points) traj.momenta.push_back(*v);
      traj.energies.push_back(traj.f_values.back() + v->squaredNorm() / (2.0 * eta_prime));
    }
  }
};

// Shared loop of the plain and noisy-gradient variants; `oracle` supplies the
// gradient used both for the small-gradient trigger and the descent step.
// Recorded gradient norms are always the exact ones.
template <typename GradOracle>
Trajectory pgd_loop(const Landscape& f, const Vec& x0, const ScheduleParams& params, Rng& rng,
                    const OptimOptions& opts, bool oracle_exact, GradOracle&& oracle) {
  const long long total = opts.max_iters >= 0 ? opts.max_iters : params.T;
  const double t_e = opts.t_e >= 0.0 ? opts.t_e : params.script_T_prime;

  Recorder rec{{}, opts.record_points, false};
  Vec x = x0;
  Vec g = oracle(x, rng);
  const auto true_norm = [&](const Vec& at, const Vec& oracle_g) {
    return oracle_exact ? oracle_g.norm() : gradient(f, at).norm();
  };
  rec.push(f, x, true_norm(x, g), nullptr, 0.0);

  for (long long t = 0; t < total; ++t) {
    if (g.norm() <= params.eps) {
      const double f_before = evaluate(f, x);
      const PerturbationSample xi =
          quantum_simulation_sample(f, x, params, t_e, opts.backend, rng, opts.pde);
      const Vec x_perturbed = apply_perturbation(f, x, xi, params.eps, params.rho);
      const double drop = f_before - evaluate(f, x_perturbed);
      rec.traj.events.push_back({t, EventKind::qs_call, drop});
      if (opts.early_stop && drop < params.script_F_prime) {
        // No useful decrease: the pre-perturbation point was already second
        // order stationary with high probability.
        const SospCertificate cert = is_eps_sosp(f, x, params.eps, params.rho);
        rec.traj.events.push_back({t, EventKind::sosp_certified, cert.lambda_min});
        rec.traj.certified = true;
        rec.traj.certified_x = x;
        rec.traj.final_x = x;
        return std::move(rec.traj);
      }
      x = x_perturbed;
      g = oracle(x, rng);
    }
    x = x - params.eta * g;
    g = oracle(x, rng);
    rec.push(f, x, true_norm(x, g), nullptr, 0.0);
  }
  rec.traj.final_x = x;
  return std::move(rec.traj);
}

}  // namespace

std::string event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::qs_call: return "qs_call";
    case EventKind::nce_momentum_reset: return "nce_momentum_reset";
    case EventKind::nce_step: return "nce_step";
    case EventKind::perturb_classical: return "perturb_classical";
    case EventKind::sosp_certified: return "sosp_certified";
  }
  return "unknown";
}

Eigen::VectorXd gd_step(const Landscape& f, const Eigen::VectorXd& x, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("gd_step: eta must be positive");
  return x - eta * gradient(f, x);
}

Trajectory pgd_classical(const Landscape& f, const Eigen::VectorXd& x0,
                         const ScheduleParams& params, double ball_radius, Rng& rng,
                         const OptimOptions& opts) {
  const long long total = opts.max_iters >= 0 ? opts.max_iters : params.T;
  Recorder rec{{}, opts.record_points, false};
  Vec x = x0;
  Vec g = gradient(f, x);
  rec.push(f, x, g.norm(), nullptr, 0.0);
  for (long long t = 0; t < total; ++t) {
    if (g.norm() <= params.eps) {
      x += rng.uniform_ball(f.dim, ball_radius);
      rec.traj.events.push_back({t, EventKind::perturb_classical, 0.0});
      g = gradient(f, x);
    }
    x = x - params.eta * g;
    g = gradient(f, x);
    rec.push(f, x, g.norm(), nullptr, 0.0);
  }
  rec.traj.final_x = x;
  return std::move(rec.traj);
}

Trajectory pgd_qs(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                  Rng& rng, const OptimOptions& opts) {
  return pgd_loop(f, x0, params, rng, opts, true,
                  [&f](const Vec& x, Rng&) { return gradient(f, x); });
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> nce(const Landscape& f, const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& v, double s) {
  if (s <= 0.0) throw std::invalid_argument("nce: s must be positive");
  const Vec zero = Vec::Zero(x.size());
  const double vnorm = v.norm();
  if (vnorm >= s || vnorm == 0.0) return {x, zero};
  const Vec delta = (s / vnorm) * v;
  const Vec plus = x + delta;
  const Vec minus = x - delta;
  return {evaluate(f, plus) <= evaluate(f, minus) ? plus : minus, zero};
}

double agd_hamiltonian(const Landscape& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                       double eta_prime) {
  if (eta_prime <= 0.0) throw std::invalid_argument("agd_hamiltonian: eta' must be positive");
  return evaluate(f, x) + v.squaredNorm() / (2.0 * eta_prime);
}

Trajectory pagd_qs(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                   Rng& rng, const OptimOptions& opts) {
  const long long total = opts.max_iters >= 0 ? opts.max_iters : params.T_pagd;
  const double t_e = opts.t_e >= 0.0 ? opts.t_e : params.script_T_prime;

  Recorder rec{{}, opts.record_points, true};
  Vec x = x0;
  Vec v = Vec::Zero(f.dim);
  Vec g = gradient(f, x);
  rec.push(f, x, g.norm(), &v, params.eta_prime);

  for (long long t = 0; t < total; ++t) {
    if (g.norm() <= params.eps) {
      const double f_before = evaluate(f, x);
      const PerturbationSample xi =
          quantum_simulation_sample(f, x, params, t_e, opts.backend, rng, opts.pde);
      const Vec x_perturbed = apply_perturbation(f, x, xi, params.eps, params.rho);
      const double drop = f_before - evaluate(f, x_perturbed);
      rec.traj.events.push_back({t, EventKind::qs_call, drop});
      if (opts.early_stop && drop < params.script_F_prime) {
        const SospCertificate cert = is_eps_sosp(f, x, params.eps, params.rho);
        rec.traj.events.push_back({t, EventKind::sosp_certified, cert.lambda_min});
        rec.traj.certified = true;
        rec.traj.certified_x = x;
        rec.traj.final_x = x;
        return std::move(rec.traj);
      }
      x = x_perturbed;
      v.setZero();
    } else {
      const Vec y = x + (1.0 - params.theta) * v;
      const Vec gy = gradient(f, y);
      Vec x_next = y - params.eta_prime * gy;
      Vec v_next = x_next - x;
      // Nonconvexity certificate between x_t and y_t (squared-norm margin);
      // vacuous when the two points coincide.
      const Vec diff = x - y;
      const double dn2 = diff.squaredNorm();
      if (dn2 > 0.0 &&
          evaluate(f, x) <= evaluate(f, y) + gy.dot(diff) - 0.5 * params.gamma * dn2) {
        const double vnorm = v.norm();
        auto [x_nce, v_nce] = nce(f, x, v, params.s);
        rec.traj.events.push_back(
            {t, vnorm >= params.s ? EventKind::nce_momentum_reset : EventKind::nce_step, vnorm});
        x_next = x_nce;
        v_next = v_nce;
      }
      x = x_next;
      v = v_next;
    }
    g = gradient(f, x);
    rec.push(f, x, g.norm(), &v, params.eta_prime);
  }
  rec.traj.final_x = x;
  return std::move(rec.traj);
}

double NoisyGradientModel::bound() const {
  return 400.0 * n * std::sqrt(delta_q * ell) * omega0;
}

Eigen::VectorXd noisy_gradient(const Landscape& f, const Eigen::VectorXd& x,
                               const NoisyGradientModel& model, Rng& rng) {
  Vec g = gradient(f, x);
  const double b = model.bound();
  if (b > 0.0) g += rng.uniform_ball(f.dim, b);
  return g;
}

Trajectory pgd_jordan(const Landscape& f, const Eigen::VectorXd& x0, const ScheduleParams& params,
                      const NoisyGradientModel& model, Rng& rng, const OptimOptions& opts) {
  const double admissible =
      (1.0 / (2.0 * params.ell)) * std::pow(params.delta * params.eps / (1000.0 * params.n * params.n), 2);
  if (model.delta_q > admissible) {
    std::cerr << "pgd_jordan: delta_q " << model.delta_q << " exceeds the admissible bound "
              << admissible << " for (delta, eps); convergence not guaranteed\n";
  }
  return pgd_loop(f, x0, params, rng, opts, model.bound() == 0.0,
                  [&f, &model](const Vec& x, Rng& r) { return noisy_gradient(f, x, model, r); });
}

SospCertificate is_eps_sosp(const Landscape& f, const Eigen::VectorXd& x, double eps, double rho) {
  SospCertificate cert;
  cert.grad_norm = gradient(f, x).norm();
  const Mat h = f.has_hessian() ? hessian(f, x) : finite_difference_hessian(f, x);
  cert.lambda_min = lambda_min_of(h, f.diagonal_hessian);
  cert.sosp = cert.grad_norm <= eps && cert.lambda_min >= -std::sqrt(rho * eps);
  return cert;
}

void trajectory_to_csv(const Trajectory& traj, const std::string& path) {
  CsvWriter csv(path);
  csv.header({"t", "f", "grad_norm", "event"});
  std::size_t next_event = 0;
  for (std::size_t t = 0; t < traj.f_values.size(); ++t) {
    std::string event;
    while (next_event < traj.events.size() &&
           traj.events[next_event].t == static_cast<long long>(t)) {
      if (!event.empty()) event += '+';
      event += event_kind_name(traj.events[next_event].kind);
      ++next_event;
    }
    csv.write_row({format_double(static_cast<double>(t)), format_double(traj.f_values[t]),
                   format_double(traj.grad_norms[t]), event});
  }
}

}  // namespace qsaddle
