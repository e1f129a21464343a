#include "qsaddle/wavesim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsaddle/csv.hpp"

namespace qsaddle {
namespace {

// 256^3 fits; anything bigger is almost certainly a misconfiguration.
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 25;

void check_finite(const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  if (!q.allFinite() || !p.allFinite()) {
    throw std::runtime_error("wavesim: non-finite amplitudes encountered (blow-up)");
  }
}

}  // namespace

Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "dirichlet") return Boundary::dirichlet;
  throw std::invalid_argument("unknown boundary condition: " + s);
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(mesh);
  return n;
}

Eigen::VectorXd GridSpec::point_at(std::size_t flat) const {
  Eigen::VectorXd x(dim);
  for (int d = 0; d < dim; ++d) {
    x[d] = coord(static_cast<int>(flat % static_cast<std::size_t>(mesh)));
    flat /= static_cast<std::size_t>(mesh);
  }
  return x;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= spacing;
  return v;
}

GridSpec build_grid(int dim, double half_width, int mesh, Boundary boundary) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("build_grid: dim must be 1, 2 or 3");
  if (mesh < 4) throw std::invalid_argument("build_grid: mesh must be at least 4");
  if (half_width <= 0.0) throw std::invalid_argument("build_grid: half_width must be positive");
  double points = std::pow(static_cast<double>(mesh), dim);
  if (points > static_cast<double>(kMaxGridPoints)) {
    throw std::invalid_argument("build_grid: grid cap exceeded (" + std::to_string(mesh) + "^" +
                                std::to_string(dim) + " points)");
  }
  GridSpec g;
  g.dim = dim;
  g.half_width = half_width;
  g.mesh = mesh;
  g.spacing = 2.0 * half_width / mesh;
  g.boundary = boundary;
  return g;
}

double WaveState::norm() const {
  return (q.squaredNorm() + p.squaredNorm()) * grid.cell_volume();
}

DiscreteHamiltonian discretize(const GridSpec& grid,
                               const std::function<double(const Eigen::VectorXd&)>& potential,
                               double r0) {
  if (r0 <= 0.0) throw std::invalid_argument("discretize: r0 must be positive");
  DiscreteHamiltonian h;
  h.grid = grid;
  h.r0 = r0;
  const std::size_t n = grid.size();
  h.potential.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double v = potential(grid.point_at(j));
    if (!std::isfinite(v)) {
      throw std::invalid_argument("discretize: non-finite potential value on grid");
    }
    h.potential[static_cast<Eigen::Index>(j)] = v;
  }
  h.kinetic_off_ = r0 * r0 / (2.0 * grid.spacing * grid.spacing);
  h.max_abs_potential_ = h.potential.cwiseAbs().maxCoeff();
  h.diag_ = (h.potential / (r0 * r0)).array() + 2.0 * grid.dim * h.kinetic_off_;
  return h;
}

double DiscreteHamiltonian::lambda_max_est() const {
  // Kinetic part: diagonal 2*dim*koff plus off-diagonal row sum of the same
  // size, i.e. 2*dim*r0^2/a^2 in total. |koff| keeps the bound valid for the
  // negated operator.
  return 4.0 * grid.dim * std::abs(kinetic_off_) + max_abs_potential_ / (r0 * r0);
}

DiscreteHamiltonian DiscreteHamiltonian::negated() const {
  DiscreteHamiltonian out = *this;
  out.potential = -potential;
  out.diag_ = -diag_;
  out.kinetic_off_ = -kinetic_off_;
  return out;
}

void DiscreteHamiltonian::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const int n = grid.mesh;
  const bool periodic = grid.boundary == Boundary::periodic;
  const double koff = kinetic_off_;
  out.resize(in.size());
  const double* src = in.data();
  const double* dia = diag_.data();
  double* dst = out.data();

  if (grid.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double nb = 0.0;
      if (i > 0) nb += src[i - 1];
      else if (periodic) nb += src[n - 1];
      if (i < n - 1) nb += src[i + 1];
      else if (periodic) nb += src[0];
      dst[i] = dia[i] * src[i] - koff * nb;
    }
    return;
  }

  if (grid.dim == 2) {
    for (int iy = 0; iy < n; ++iy) {
      const double* row = src + static_cast<std::size_t>(iy) * n;
      const double* up = iy > 0 ? row - n : (periodic ? src + static_cast<std::size_t>(n - 1) * n : nullptr);
      const double* dn = iy < n - 1 ? row + n : (periodic ? src : nullptr);
      const double* dr = dia + static_cast<std::size_t>(iy) * n;
      double* o = dst + static_cast<std::size_t>(iy) * n;
      for (int ix = 0; ix < n; ++ix) {
        double nb = 0.0;
        if (ix > 0) nb += row[ix - 1];
        else if (periodic) nb += row[n - 1];
        if (ix < n - 1) nb += row[ix + 1];
        else if (periodic) nb += row[0];
        if (up) nb += up[ix];
        if (dn) nb += dn[ix];
        o[ix] = dr[ix] * row[ix] - koff * nb;
      }
    }
    return;
  }

  // dim == 3
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  for (int iz = 0; iz < n; ++iz) {
    for (int iy = 0; iy < n; ++iy) {
      const std::size_t base = iz * plane + static_cast<std::size_t>(iy) * n;
      for (int ix = 0; ix < n; ++ix) {
        const std::size_t j = base + ix;
        double nb = 0.0;
        if (ix > 0) nb += src[j - 1];
        else if (periodic) nb += src[j + (n - 1)];
        if (ix < n - 1) nb += src[j + 1];
        else if (periodic) nb += src[j - (n - 1)];
        if (iy > 0) nb += src[j - n];
        else if (periodic) nb += src[j + static_cast<std::size_t>(n) * (n - 1)];
        if (iy < n - 1) nb += src[j + n];
        else if (periodic) nb += src[j - static_cast<std::size_t>(n) * (n - 1)];
        if (iz > 0) nb += src[j - plane];
        else if (periodic) nb += src[j + plane * (n - 1)];
        if (iz < n - 1) nb += src[j + plane];
        else if (periodic) nb += src[j - plane * (n - 1)];
        dst[j] = dia[j] * src[j] - koff * nb;
      }
    }
  }
}

Eigen::VectorXd DiscreteHamiltonian::apply(const Eigen::VectorXd& in) const {
  Eigen::VectorXd out;
  apply(in, out);
  return out;
}

WaveState initial_gaussian(const GridSpec& grid, const Eigen::VectorXd& center, double r0) {
  if (center.size() != grid.dim) {
    throw std::invalid_argument("initial_gaussian: center dimension mismatch");
  }
  if (r0 <= 0.0) throw std::invalid_argument("initial_gaussian: r0 must be positive");
  if (r0 < 2.0 * grid.spacing) {
    throw std::invalid_argument("initial_gaussian: packet under-resolved (r0 < 2 spacing)");
  }
  for (int d = 0; d < grid.dim; ++d) {
    if (std::abs(center[d]) >= grid.half_width) {
      throw std::invalid_argument("initial_gaussian: center outside box");
    }
  }
  WaveState s;
  s.grid = grid;
  const std::size_t total = grid.size();
  s.q.resize(static_cast<Eigen::Index>(total));
  s.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  for (std::size_t j = 0; j < total; ++j) {
    const Eigen::VectorXd x = grid.point_at(j);
    s.q[static_cast<Eigen::Index>(j)] = std::exp(-(x - center).squaredNorm() / (4.0 * r0 * r0));
  }
  s.q /= std::sqrt(s.q.squaredNorm() * grid.cell_volume());
  s.t = 0.0;
  return s;
}

WaveState evolve(const DiscreteHamiltonian& h, WaveState state, double t_e, double dt) {
  if (t_e < 0.0) throw std::invalid_argument("evolve: negative duration");
  if (t_e == 0.0) return state;
  const double lambda_max = h.lambda_max_est();
  if (dt > 0.0) {
    if (dt * lambda_max >= 2.0) {
      throw std::invalid_argument("evolve: unstable dt (dt * |H| >= 2)");
    }
  } else {
    dt = 0.5 / lambda_max;
  }

  const double norm0 = state.norm();
  Eigen::VectorXd hq(state.q.size()), hp(state.p.size());

  // One uniform leapfrog segment: half kick, drift/kick pairs, half kick.
  const auto segment = [&](double step, long long count) {
    h.apply(state.q, hq);
    state.p -= (0.5 * step) * hq;
    for (long long k = 0; k < count; ++k) {
      h.apply(state.p, hp);
      state.q += step * hp;
      h.apply(state.q, hq);
      state.p -= (k + 1 < count ? step : 0.5 * step) * hq;
    }
  };

  const auto steps_total = static_cast<long long>(std::ceil(t_e / dt - 1e-12));
  const double remainder = t_e - static_cast<double>(steps_total - 1) * dt;
  if (steps_total > 1) segment(dt, steps_total - 1);
  if (remainder > 1e-12 * t_e) segment(remainder, 1);

  check_finite(state.q, state.p);
  const double drift = std::abs(state.norm() - norm0);
  if (drift > 1e-3) {
    throw std::runtime_error("evolve: norm drift " + std::to_string(drift) + " signals instability");
  }
  state.t += t_e;
  return state;
}

double marginal_mean(const WaveState& state, int axis) {
  if (axis < 0 || axis >= state.grid.dim) throw std::invalid_argument("marginal_mean: bad axis");
  const std::size_t n = static_cast<std::size_t>(state.grid.mesh);
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= n;
  double mean = 0.0, total = 0.0;
  const std::size_t count = state.grid.size();
  for (std::size_t j = 0; j < count; ++j) {
    const double prob = state.q[j] * state.q[j] + state.p[j] * state.p[j];
    const double x = state.grid.coord(static_cast<int>((j / stride) % n));
    mean += prob * x;
    total += prob;
  }
  return mean / total;
}

double marginal_variance(const WaveState& state, int axis) {
  if (axis < 0 || axis >= state.grid.dim) throw std::invalid_argument("marginal_variance: bad axis");
  const double mean = marginal_mean(state, axis);
  const std::size_t n = static_cast<std::size_t>(state.grid.mesh);
  std::size_t stride = 1;
  for (int d = 0; d < axis; ++d) stride *= n;
  double var = 0.0, total = 0.0;
  const std::size_t count = state.grid.size();
  for (std::size_t j = 0; j < count; ++j) {
    const double prob = state.q[j] * state.q[j] + state.p[j] * state.p[j];
    const double dx = state.grid.coord(static_cast<int>((j / stride) % n)) - mean;
    var += prob * dx * dx;
    total += prob;
  }
  return var / total;
}

GridSampler::GridSampler(const WaveState& state) : grid_(state.grid) {
  const std::size_t count = grid_.size();
  cdf_.resize(count);
  double acc = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    acc += state.q[j] * state.q[j] + state.p[j] * state.p[j];
    cdf_[j] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("GridSampler: zero-probability state");
}

Eigen::VectorXd GridSampler::draw(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t j = std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return grid_.point_at(j);
}

Eigen::VectorXd measure(const WaveState& state, Rng& rng) {
  return GridSampler(state).draw(rng);
}

double tv_distance(const WaveState& state,
                   const std::function<double(const Eigen::VectorXd&)>& density) {
  const double vol = state.grid.cell_volume();
  const std::size_t count = state.grid.size();
  double tv = 0.0;
  double law_mass_in_box = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double prob = (state.q[j] * state.q[j] + state.p[j] * state.p[j]) * vol;
    const double law_cell = density(state.grid.point_at(j)) * vol;
    law_mass_in_box += law_cell;
    tv += std::abs(prob - law_cell);
  }
  // The state carries no mass outside the box, so whatever law mass lies
  // there is pure discrepancy.
  return 0.5 * (tv + std::max(0.0, 1.0 - law_mass_in_box));
}

double tv_distance(const WaveState& state, const GaussianLaw& law) {
  if (law.dim() != state.grid.dim) {
    throw std::invalid_argument("tv_distance: law dimension mismatch");
  }
  return tv_distance(state, [&law](const Eigen::VectorXd& x) { return law.density(x); });
}

void dump_snapshot_csv(const WaveState& state, const std::string& path) {
  CsvWriter csv(path);
  std::vector<std::string> header;
  for (int d = 0; d < state.grid.dim; ++d) header.push_back("i" + std::to_string(d));
  for (int d = 0; d < state.grid.dim; ++d) header.push_back("x" + std::to_string(d));
  header.insert(header.end(), {"re", "im", "prob"});
  csv.header(header);
  const double vol = state.grid.cell_volume();
  const std::size_t count = state.grid.size();
  const std::size_t n = static_cast<std::size_t>(state.grid.mesh);
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<double> row;
    std::size_t rem = j;
    for (int d = 0; d < state.grid.dim; ++d) {
      row.push_back(static_cast<double>(rem % n));
      rem /= n;
    }
    const Eigen::VectorXd x = state.grid.point_at(j);
    for (int d = 0; d < state.grid.dim; ++d) row.push_back(x[d]);
    row.push_back(state.q[j]);
    row.push_back(state.p[j]);
    row.push_back((state.q[j] * state.q[j] + state.p[j] * state.p[j]) * vol);
    csv.row(row);
  }
}

}  // namespace qsaddle
