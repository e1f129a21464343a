#pragma once

#include <memory>

#include <Eigen/Dense>

#include "qsaddle/landscape.hpp"
#include "qsaddle/rng.hpp"
#include "qsaddle/schedule.hpp"
#include "qsaddle/wavesim.hpp"

namespace qsaddle {

enum class PerturbBackend { analytic, pde };

PerturbBackend backend_from_string(const std::string& s);

// Measured displacement of the evolved wave packet relative to its anchor.
struct PerturbationSample {
  Eigen::VectorXd xi;
  PerturbBackend backend = PerturbBackend::analytic;
  double t_e = 0.0;
};

// Grid settings for the PDE backend. box_half_width <= 0 uses params.M.
struct PdeOptions {
  int mesh = 256;
  Boundary boundary = Boundary::dirichlet;
  double dt = 0.0;  // <= 0 selects automatic step
  double box_half_width = 0.0;
};

// Evolves the spread-r0 Gaussian packet centered at x_tilde under the
// gradient-subtracted potential f(x) - <grad f(x_tilde), x - x_tilde> for
// time t_e and measures its position. The analytic backend evolves under the
// local Hessian (exact when f is quadratic); the PDE backend runs the
// finite-difference simulator on a box around x_tilde.
PerturbationSample quantum_simulation_sample(const Landscape& f, const Eigen::VectorXd& x_tilde,
                                             const ScheduleParams& params, double t_e,
                                             PerturbBackend backend, Rng& rng,
                                             const PdeOptions& pde = {});

// Bulk sampler for Monte Carlo batches: the deterministic part of the PDE
// pipeline (one wave evolution) is shared across draws.
class PerturbationSampler {
 public:
  PerturbationSampler(const Landscape& f, const Eigen::VectorXd& x_tilde,
                      const ScheduleParams& params, double t_e, PerturbBackend backend,
                      const PdeOptions& pde = {});
  PerturbationSample draw(Rng& rng) const;

  // Diagnostics: the evolved wave state in anchor-relative coordinates (PDE
  // backend only) and the closed-form law (analytic backend only).
  const WaveState* wave_state() const { return state_.get(); }
  const GaussianLaw& law() const { return law_; }

 private:
  Eigen::VectorXd x_tilde_;
  double t_e_;
  PerturbBackend backend_;
  GaussianLaw law_;                      // analytic backend
  std::unique_ptr<WaveState> state_;     // pde backend
  std::unique_ptr<GridSampler> sampler_; // pde backend
};

// Moves x_t by (2/3) sqrt(eps/rho) along +-xi/|xi|, keeping the candidate
// with the smaller function value (ties resolve to +).
Eigen::VectorXd apply_perturbation(const Landscape& f, const Eigen::VectorXd& x_t,
                                   const PerturbationSample& xi, double eps, double rho);

}  // namespace qsaddle
