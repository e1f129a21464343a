#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsaddle/analytic.hpp"
#include "qsaddle/rng.hpp"

namespace qsaddle {

enum class Boundary { periodic, dirichlet };

Boundary boundary_from_string(const std::string& s);

// Uniform grid on the box [-M, M]^dim; grid points are cell centers,
// x_i = -M + (i + 1/2) a with a = 2M/mesh.
struct GridSpec {
  int dim = 0;
  double half_width = 0.0;
  int mesh = 0;
  double spacing = 0.0;
  Boundary boundary = Boundary::dirichlet;

  std::size_t size() const;
  double coord(int axis_index) const { return -half_width + (axis_index + 0.5) * spacing; }
  Eigen::VectorXd point_at(std::size_t flat) const;
  double cell_volume() const;
};

GridSpec build_grid(int dim, double half_width, int mesh, Boundary boundary);

// Wave function split into real and imaginary parts on the flattened grid
// (axis 0 fastest). Unit discrete L2 norm: sum (q^2 + p^2) a^dim = 1.
struct WaveState {
  GridSpec grid;
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  double t = 0.0;

  double norm() const;
};

// Matrix-free H = (r0^2 / 2a^2) L + diag(V / r0^2) with L the second-order
// graph Laplacian of the grid (diagonal 2*dim, off-diagonal -1 towards each
// neighbor; Dirichlet treats out-of-box neighbors as zero amplitude).
struct DiscreteHamiltonian {
  GridSpec grid;
  double r0 = 0.0;
  Eigen::VectorXd potential;  // raw V(x_j) values

  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& in) const;

  // Gershgorin bound on the spectral norm; leapfrog needs dt * |H| < 2.
  double lambda_max_est() const;

  // -H; evolving under it reverses the dynamics.
  DiscreteHamiltonian negated() const;

 private:
  friend DiscreteHamiltonian discretize(const GridSpec&,
                                        const std::function<double(const Eigen::VectorXd&)>&,
                                        double);
  Eigen::VectorXd diag_;       // 2*dim*koff + V/r0^2
  double kinetic_off_ = 0.0;   // r0^2 / (2 a^2)
  double max_abs_potential_ = 0.0;
};

DiscreteHamiltonian discretize(const GridSpec& grid,
                               const std::function<double(const Eigen::VectorXd&)>& potential,
                               double r0);

// Normalized Gaussian amplitude exp(-|x - center|^2 / 4 r0^2) with zero
// imaginary part; |Phi|^2 has per-axis variance r0^2.
WaveState initial_gaussian(const GridSpec& grid, const Eigen::VectorXd& center, double r0);

// Advances Qdot = HP, Pdot = -HQ with the second-order leapfrog scheme for
// ceil(t_e/dt) steps, the last one shortened to land exactly on t_e.
// dt <= 0 selects the automatic step 0.5 / lambda_max_est.
WaveState evolve(const DiscreteHamiltonian& h, WaveState state, double t_e, double dt = 0.0);

double marginal_mean(const WaveState& state, int axis);
double marginal_variance(const WaveState& state, int axis);

// Inverse-CDF position sampler over the flattened grid; build once, draw many.
class GridSampler {
 public:
  explicit GridSampler(const WaveState& state);
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  GridSpec grid_;
  std::vector<double> cdf_;
};

// One position measurement (cell-center coordinates).
Eigen::VectorXd measure(const WaveState& state, Rng& rng);

// 0.5 * sum_j |p_j - density(x_j) * a^dim|, the grid approximation of total
// variation distance against a continuous law.
double tv_distance(const WaveState& state,
                   const std::function<double(const Eigen::VectorXd&)>& density);
double tv_distance(const WaveState& state, const GaussianLaw& law);

// CSV snapshot: per-axis indices, coordinates, Re, Im, probability.
void dump_snapshot_csv(const WaveState& state, const std::string& path);

}  // namespace qsaddle
