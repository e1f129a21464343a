#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace qsaddle {

// Deterministic random source. All draws are derived from mt19937_64 output
// through fixed arithmetic (no std::*_distribution), so a given seed produces
// the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. One draw consumes two uniforms; the sine
  // branch is discarded so no state is carried between calls.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  // Uniform draw from the closed ball of the given radius.
  Eigen::VectorXd uniform_ball(Eigen::Index n, double radius) {
    Eigen::VectorXd z = normal_vector(n);
    double norm = z.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(n);
    const double r = radius * std::pow(uniform_pos(), 1.0 / static_cast<double>(n));
    return z * (r / norm);
  }

 private:
  std::mt19937_64 gen_;
};

// Per-run seed for Monte Carlo batches: run i uses base_seed + i, so one
// sample's result does not depend on how many samples are requested.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t index) {
  return base + index;
}

}  // namespace qsaddle
