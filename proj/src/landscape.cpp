#include "qsaddle/landscape.hpp"

#include <cmath>

namespace qsaddle {
namespace {

void check_dim(const Landscape& f, const Vec& x) {
  if (x.size() != f.dim) {
    throw std::invalid_argument("landscape '" + f.name + "' expects dimension " +
                                std::to_string(f.dim) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

double evaluate(const Landscape& f, const Vec& x) {
  check_dim(f, x);
  return f.eval(x);
}

Vec gradient(const Landscape& f, const Vec& x) {
  check_dim(f, x);
  return f.grad(x);
}

Mat hessian(const Landscape& f, const Vec& x) {
  check_dim(f, x);
  if (!f.has_hessian()) throw std::invalid_argument("landscape '" + f.name + "' has no Hessian");
  return f.hess(x);
}

Landscape make_quad2d() {
  Landscape f;
  f.name = "quad2d";
  f.dim = 2;
  f.eval = [](const Vec& x) { return -0.5 * x[0] * x[0] + 1.5 * x[1] * x[1]; };
  f.grad = [](const Vec& x) { return Vec{{-x[0], 3.0 * x[1]}}; };
  f.hess = [](const Vec&) {
    Mat h(2, 2);
    h << -1.0, 0.0, 0.0, 3.0;
    return h;
  };
  // Constant Hessian diag(-1, 3): spectral norm 3, Lipschitz modulus 0.
  f.ell = 3.0;
  f.rho = 0.0;
  f.domain_radius = 3.0;
  f.diagonal_hessian = true;
  return f;
}

Landscape make_quartic2d() {
  Landscape f;
  f.name = "quartic2d";
  f.dim = 2;
  f.eval = [](const Vec& x) {
    const double x2 = x[0] * x[0];
    return x2 * x2 / 12.0 - 0.5 * x2 + 0.5 * x[1] * x[1];
  };
  f.grad = [](const Vec& x) {
    return Vec{{x[0] * x[0] * x[0] / 3.0 - x[0], x[1]}};
  };
  f.hess = [](const Vec& x) {
    Mat h(2, 2);
    h << x[0] * x[0] - 1.0, 0.0, 0.0, 1.0;
    return h;
  };
  // On |x| <= 3: |x^2 - 1| <= 8 and |d/dx (x^2 - 1)| = 2|x| <= 6.
  f.ell = 8.0;
  f.rho = 6.0;
  f.domain_radius = 3.0;
  f.diagonal_hessian = true;
  return f;
}

Landscape make_cubic2d() {
  Landscape f;
  f.name = "cubic2d";
  f.dim = 2;
  f.eval = [](const Vec& x) {
    return x[0] * x[0] * x[0] - x[1] * x[1] * x[1] - 2.0 * x[0] * x[1] + 6.0;
  };
  f.grad = [](const Vec& x) {
    return Vec{{3.0 * x[0] * x[0] - 2.0 * x[1], -3.0 * x[1] * x[1] - 2.0 * x[0]}};
  };
  f.hess = [](const Vec& x) {
    Mat h(2, 2);
    h << 6.0 * x[0], -2.0, -2.0, -6.0 * x[1];
    return h;
  };
  // On |x|,|y| <= 3 the Hessian [[6x,-2],[-2,-6y]] has spectral norm at most
  // 20 (attained at x=3, y=-3); differences are diag(6dx, -6dy), norm <= 6|dz|.
  f.ell = 20.0;
  f.rho = 6.0;
  f.domain_radius = 3.0;
  return f;
}

Landscape make_diagquad(int n, double eps) {
  if (n < 1) throw std::invalid_argument("diagquad: n must be positive");
  if (eps <= 0.0) throw std::invalid_argument("diagquad: eps must be positive");
  Landscape f;
  f.name = "diagquad";
  f.dim = n;
  f.eval = [eps](const Vec& x) {
    const double rest = x.size() > 1 ? x.tail(x.size() - 1).squaredNorm() : 0.0;
    return 0.5 * (-eps * x[0] * x[0] + rest);
  };
  f.grad = [eps](const Vec& x) {
    Vec g = x;
    g[0] *= -eps;
    return g;
  };
  f.hess = [n, eps](const Vec&) {
    Vec d = Vec::Ones(n);
    d[0] = -eps;
    return Mat(d.asDiagonal());
  };
  f.ell = std::max(1.0, eps);
  f.rho = 0.0;
  f.diagonal_hessian = true;
  return f;
}

Landscape make_shifted_quad1d(double lambda, double d) {
  Landscape f;
  f.name = "shifted_quad1d";
  f.dim = 1;
  f.eval = [lambda, d](const Vec& x) {
    const double u = x[0] - d;
    return 0.5 * lambda * u * u;
  };
  f.grad = [lambda, d](const Vec& x) { return Vec{{lambda * (x[0] - d)}}; };
  f.hess = [lambda](const Vec&) { return Mat::Constant(1, 1, lambda); };
  f.ell = std::abs(lambda);
  f.rho = 0.0;
  f.diagonal_hessian = true;
  return f;
}

Landscape make_quadratic(const Mat& h, const std::string& name) {
  if (h.rows() != h.cols()) throw std::invalid_argument("quadratic: Hessian must be square");
  if (!h.isApprox(h.transpose(), 1e-12)) {
    throw std::invalid_argument("quadratic: Hessian must be symmetric");
  }
  Landscape f;
  f.name = name;
  f.dim = static_cast<int>(h.rows());
  Mat hm = h;
  f.eval = [hm](const Vec& x) { return 0.5 * x.dot(hm * x); };
  f.grad = [hm](const Vec& x) { return Vec(hm * x); };
  f.hess = [hm](const Vec&) { return hm; };
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  f.ell = es.eigenvalues().cwiseAbs().maxCoeff();
  f.rho = 0.0;
  f.diagonal_hessian = h.isDiagonal(0.0);
  return f;
}

Landscape landscape_from_config(const Config& cfg) {
  const std::string name = cfg.get_string("landscape");
  if (name == "quad2d") return make_quad2d();
  if (name == "quartic2d") return make_quartic2d();
  if (name == "cubic2d") return make_cubic2d();
  if (name == "diagquad") {
    return make_diagquad(static_cast<int>(cfg.get_int("n")), cfg.get_double("eps", 0.01));
  }
  if (name == "shifted_quad1d") {
    return make_shifted_quad1d(cfg.get_double("lambda"), cfg.get_double("d"));
  }
  throw ConfigError("unknown landscape: " + name);
}

}  // namespace qsaddle
