#include "qsaddle/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qsaddle/csv.hpp"

namespace qsaddle {
namespace {

// Below this curvature the flat-potential formula is exact to well under the
// 1e-6 continuity budget (the branch forms differ from 1 + t^2/4 by
// ~|lambda| t^2 (1 + t^2/12), i.e. < 1e-5 at t = 10).
constexpr double kFlatLambda = 1e-7;

}  // namespace

double variance_sigma2(double t, double lambda) {
  if (t < 0.0) throw std::invalid_argument("variance_sigma2: negative time");
  if (std::abs(lambda) < kFlatLambda) return 1.0 + 0.25 * t * t;
  if (lambda > 0.0) {
    const double a = std::sqrt(lambda);
    const double c = std::cos(a * t);
    const double s = std::sin(a * t);
    return c * c + s * s / (4.0 * lambda);
  }
  const double a = std::sqrt(-lambda);
  const double ch = std::cosh(a * t);
  const double sh = std::sinh(a * t);
  return ch * ch + sh * sh / (-4.0 * lambda);
}

double mean_offset(double t, double lambda, double d) {
  if (t < 0.0) throw std::invalid_argument("mean_offset: negative time");
  if (std::abs(lambda) < kFlatLambda) return 0.0;
  if (lambda > 0.0) return d * (1.0 - std::cos(std::sqrt(lambda) * t));
  return d * (1.0 - std::cosh(std::sqrt(-lambda) * t));
}

Eigen::MatrixXd GaussianLaw::covariance() const {
  return eigvecs * (r * r * eigvars.asDiagonal()) * eigvecs.transpose();
}

double GaussianLaw::density(const Eigen::VectorXd& x) const {
  const Eigen::Index n = dim();
  const Eigen::VectorXd y = eigvecs.transpose() * (x - mean);
  double quad = 0.0;
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = r * r * eigvars[i];
    quad += y[i] * y[i] / var;
    logdet += std::log(var);
  }
  return std::exp(-0.5 * (quad + logdet + n * std::log(2.0 * M_PI)));
}

void GaussianLaw::validate() const {
  const Eigen::Index n = dim();
  if (eigvecs.rows() != n || eigvecs.cols() != n || eigvars.size() != n) {
    throw std::logic_error("GaussianLaw: inconsistent dimensions");
  }
  if (r <= 0.0) throw std::logic_error("GaussianLaw: non-positive spread");
  if ((eigvars.array() <= 0.0).any()) throw std::logic_error("GaussianLaw: non-positive variance");
  const Eigen::MatrixXd gram = eigvecs.transpose() * eigvecs;
  if (!gram.isIdentity(1e-10)) throw std::logic_error("GaussianLaw: eigvecs not orthogonal");
}

GaussianLaw evolved_law(const Eigen::MatrixXd& hessian, double t, double r,
                        const Eigen::VectorXd& center) {
  if (hessian.rows() != hessian.cols()) {
    throw std::invalid_argument("evolved_law: Hessian must be square");
  }
  if (hessian.rows() != center.size()) {
    throw std::invalid_argument("evolved_law: center/Hessian dimension mismatch");
  }
  if (!hessian.isApprox(hessian.transpose(), 1e-10)) {
    throw std::invalid_argument("evolved_law: Hessian must be symmetric");
  }
  if (r <= 0.0) throw std::invalid_argument("evolved_law: spread must be positive");
  if (t < 0.0) throw std::invalid_argument("evolved_law: negative time");

  const Eigen::Index n = hessian.rows();
  GaussianLaw law;
  law.mean = center;
  law.r = r;
  law.eigvars.resize(n);

  if (hessian.isDiagonal(0.0)) {
    law.eigvecs = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      law.eigvars[i] = variance_sigma2(t, hessian(i, i));
    }
    return law;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("evolved_law: eigendecomposition failed");
  }
  law.eigvecs = es.eigenvectors();
  for (Eigen::Index i = 0; i < n; ++i) {
    law.eigvars[i] = variance_sigma2(t, es.eigenvalues()[i]);
  }
  return law;
}

void law_to_csv(const GaussianLaw& law, const std::string& path) {
  CsvWriter csv(path);
  std::vector<std::string> header{"row"};
  for (Eigen::Index d = 0; d < law.dim(); ++d) header.push_back("c" + std::to_string(d));
  csv.header(header);
  const Eigen::MatrixXd cov = law.covariance();
  std::vector<std::string> mean_row{"mean"};
  for (Eigen::Index d = 0; d < law.dim(); ++d) mean_row.push_back(format_double(law.mean[d]));
  csv.write_row(mean_row);
  for (Eigen::Index i = 0; i < law.dim(); ++i) {
    std::vector<std::string> row{"cov" + std::to_string(i)};
    for (Eigen::Index j = 0; j < law.dim(); ++j) row.push_back(format_double(cov(i, j)));
    csv.write_row(row);
  }
}

Eigen::VectorXd sample(const GaussianLaw& law, Rng& rng) {
  const Eigen::Index n = law.dim();
  Eigen::VectorXd z = rng.normal_vector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z[i] *= law.r * std::sqrt(law.eigvars[i]);
  }
  return law.mean + law.eigvecs * z;
}

}  // namespace qsaddle
