#pragma once

#include <Eigen/Dense>

#include "qsaddle/rng.hpp"

namespace qsaddle {

// Position variance of a unit-spread Gaussian wave packet evolved for time t
// in the 1-D potential lambda x^2 / 2 (dimensionless, relative to the initial
// variance). Piecewise in the curvature sign:
//   lambda = 0:  1 + t^2/4
//   lambda > 0:  cos^2(at) + sin^2(at)/(4a^2),   a = sqrt(lambda)
//   lambda < 0:  cosh^2(at) + sinh^2(at)/(4a^2), a = sqrt(-lambda)
// The trigonometric/hyperbolic forms are algebraically identical to the
// rational expressions in the source derivation but stay well conditioned
// for large at.
double variance_sigma2(double t, double lambda);

// Mean position at time t when the quadratic lambda (x - d)^2 / 2 is centered
// at d and the packet starts at the origin:
//   0 (lambda = 0); d(1 - cos at) (lambda > 0); d(1 - cosh at) (lambda < 0).
double mean_offset(double t, double lambda, double d);

// Law of the measured position of an evolved wave packet when the potential
// is quadratic: N(mean, U diag(r^2 sigma_i^2) U^T) in the Hessian eigenbasis.
struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd eigvecs;  // columns are Hessian eigenvectors
  Eigen::VectorXd eigvars;  // sigma^2(t; lambda_i), unit initial spread
  double r = 1.0;           // initial spread

  Eigen::Index dim() const { return mean.size(); }
  Eigen::MatrixXd covariance() const;
  double density(const Eigen::VectorXd& x) const;
  void validate() const;  // throws std::logic_error on a malformed law
};

// Evolves the initial N(center, r^2 I) packet for time t under the scaled
// wave equation with potential (x-center)^T H (x-center) / 2. Diagonal H
// skips the dense eigendecomposition.
GaussianLaw evolved_law(const Eigen::MatrixXd& hessian, double t, double r,
                        const Eigen::VectorXd& center);

// One position measurement; deterministic given the random source state.
Eigen::VectorXd sample(const GaussianLaw& law, Rng& rng);

// Debug dump: one mean row, then the covariance matrix row by row.
void law_to_csv(const GaussianLaw& law, const std::string& path);

}  // namespace qsaddle
