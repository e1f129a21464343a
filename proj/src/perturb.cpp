#include "qsaddle/perturb.hpp"

#include <cmath>
#include <stdexcept>

namespace qsaddle {

PerturbBackend backend_from_string(const std::string& s) {
  if (s == "analytic") return PerturbBackend::analytic;
  if (s == "pde") return PerturbBackend::pde;
  throw std::invalid_argument("unknown perturbation backend: " + s);
}

PerturbationSampler::PerturbationSampler(const Landscape& f, const Eigen::VectorXd& x_tilde,
                                         const ScheduleParams& params, double t_e,
                                         PerturbBackend backend, const PdeOptions& pde)
    : x_tilde_(x_tilde), t_e_(t_e), backend_(backend) {
  if (x_tilde.size() != f.dim) {
    throw std::invalid_argument("quantum_simulation_sample: point dimension mismatch");
  }
  if (t_e < 0.0) throw std::invalid_argument("quantum_simulation_sample: negative t_e");

  if (backend == PerturbBackend::analytic) {
    if (!f.has_hessian()) {
      throw std::invalid_argument("analytic backend requires a landscape Hessian");
    }
    law_ = evolved_law(hessian(f, x_tilde), t_e, params.r0, x_tilde);
    return;
  }

  if (f.dim > 3) {
    throw std::invalid_argument("pde backend supports at most 3 dimensions");
  }
  const double half_width = pde.box_half_width > 0.0 ? pde.box_half_width : params.M;
  const GridSpec grid = build_grid(f.dim, half_width, pde.mesh, pde.boundary);

  // Packet-relative coordinates: u = x - x_tilde. Subtracting the local
  // gradient and the constant f(x_tilde) leaves a potential that is zero and
  // stationary at the packet center.
  const Eigen::VectorXd g = gradient(f, x_tilde);
  const double f0 = evaluate(f, x_tilde);
  const auto potential = [&f, &x_tilde, &g, f0](const Eigen::VectorXd& u) {
    return evaluate(f, x_tilde + u) - g.dot(u) - f0;
  };
  const DiscreteHamiltonian h = discretize(grid, potential, params.r0);
  WaveState state = initial_gaussian(grid, Eigen::VectorXd::Zero(f.dim), params.r0);
  state = evolve(h, std::move(state), t_e, pde.dt);
  state_ = std::make_unique<WaveState>(std::move(state));
  sampler_ = std::make_unique<GridSampler>(*state_);
}

PerturbationSample PerturbationSampler::draw(Rng& rng) const {
  PerturbationSample out;
  out.backend = backend_;
  out.t_e = t_e_;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (backend_ == PerturbBackend::analytic) {
      out.xi = sample(law_, rng) - x_tilde_;
    } else {
      out.xi = sampler_->draw(rng);
    }
    if (out.xi.norm() > 0.0) return out;
    // A zero draw can only happen on the grid cell at the anchor; resample
    // once, then give up.
  }
  throw std::runtime_error("quantum_simulation_sample: degenerate zero draw twice");
}

PerturbationSample quantum_simulation_sample(const Landscape& f, const Eigen::VectorXd& x_tilde,
                                             const ScheduleParams& params, double t_e,
                                             PerturbBackend backend, Rng& rng,
                                             const PdeOptions& pde) {
  return PerturbationSampler(f, x_tilde, params, t_e, backend, pde).draw(rng);
}

Eigen::VectorXd apply_perturbation(const Landscape& f, const Eigen::VectorXd& x_t,
                                   const PerturbationSample& xi, double eps, double rho) {
  const double norm = xi.xi.norm();
  if (norm <= 0.0) throw std::invalid_argument("apply_perturbation: zero perturbation vector");
  const Eigen::VectorXd delta = (2.0 / 3.0) * std::sqrt(eps / rho) * (xi.xi / norm);
  const Eigen::VectorXd plus = x_t + delta;
  const Eigen::VectorXd minus = x_t - delta;
  return evaluate(f, plus) <= evaluate(f, minus) ? plus : minus;
}

}  // namespace qsaddle
