#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qsaddle/config.hpp"

namespace qsaddle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// An objective with exact gradient, optional Hessian, and declared smoothness
// constants. ell bounds the Hessian spectral norm and rho its Lipschitz
// modulus; for objectives that are not globally smooth the constants are
// valid on the box |x_i| <= domain_radius only.
struct Landscape {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;  // empty if unavailable
  double ell = 0.0;
  double rho = 0.0;
  std::optional<double> domain_radius;
  // Set for objectives whose Hessian is diagonal at every point; lets
  // callers skip dense eigendecompositions in high dimension.
  bool diagonal_hessian = false;

  bool has_hessian() const { return static_cast<bool>(hess); }
};

double evaluate(const Landscape& f, const Vec& x);
Vec gradient(const Landscape& f, const Vec& x);
Mat hessian(const Landscape& f, const Vec& x);

// f1(x,y) = -x^2/2 + 3y^2/2; saddle at the origin.
Landscape make_quad2d();
// f2(x,y) = x^4/12 - x^2/2 + y^2/2; saddle at the origin, minima (+-sqrt(3), 0).
Landscape make_quartic2d();
// g(x,y) = x^3 - y^3 - 2xy + 6; saddle at the origin, no global minimum.
Landscape make_cubic2d();
// h(x) = x^T diag(-eps, 1, ..., 1) x / 2.
Landscape make_diagquad(int n, double eps);
// f(x) = (lambda/2)(x - d)^2 in one dimension.
Landscape make_shifted_quad1d(double lambda, double d);
// Arbitrary quadratic x^T H x / 2 with declared constants derived from H.
Landscape make_quadratic(const Mat& hessian_matrix, const std::string& name = "quadratic");

// Selection by name + parameter map, e.g. landscape = diagquad, n = 100,
// eps = 0.01. Landscape-specific keys: n, eps (diagquad); lambda, d
// (shifted_quad1d).
Landscape landscape_from_config(const Config& cfg);

}  // namespace qsaddle
