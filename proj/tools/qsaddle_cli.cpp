// Command-line front end: wave-packet simulations, single optimizer runs,
// comparison benchmarks, and the numerical invariant checks.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "qsaddle/analytic.hpp"
#include "qsaddle/bench.hpp"
#include "qsaddle/config.hpp"
#include "qsaddle/csv.hpp"
#include "qsaddle/landscape.hpp"
#include "qsaddle/optim.hpp"
#include "qsaddle/perturb.hpp"
#include "qsaddle/schedule.hpp"
#include "qsaddle/wavesim.hpp"

namespace {

using namespace qsaddle;

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::string profile = "ci";
};

Config load_config(const CommonArgs& args) {
  Config cfg = args.config_path.empty() ? Config() : Config::from_file(args.config_path);
  // Profile defaults fill in only what the config leaves unset.
  if (args.profile == "paper") {
    if (!cfg.has("mesh")) cfg.set("mesh", "512");
    if (!cfg.has("samples")) cfg.set("samples", "1000");
  } else if (args.profile == "ci") {
    if (!cfg.has("mesh")) cfg.set("mesh", "256");
    if (!cfg.has("samples")) cfg.set("samples", "200");
  } else {
    throw ConfigError("unknown profile: " + args.profile);
  }
  return cfg;
}

int run_simulate(const CommonArgs& args) {
  const Config cfg = load_config(args);
  std::filesystem::create_directories(args.out_dir);
  const DispersionResult result = run_dispersion(cfg, args.out_dir);
  emit_dispersion_csv(result, args.out_dir + "/dispersion.csv");
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    std::cout << "t=" << result.times[i];
    for (std::size_t d = 0; d < result.variances[i].size(); ++d) {
      std::cout << " var_x" << d << "=" << format_double(result.variances[i][d]);
    }
    std::cout << '\n';
  }
  return 0;
}

int run_escape(const CommonArgs& args) {
  Config cfg = load_config(args);
  const Landscape f = landscape_from_config(cfg);
  const std::string algorithm = cfg.get_string("algorithm", "pgd_qs");
  const double eps = cfg.get_double("eps_target", 0.05);
  const double rho = cfg.has("rho") ? cfg.get_double("rho") : std::max(f.rho, 1e-3);
  const double delta = cfg.get_double("delta", 0.1);
  const double f_gap = cfg.get_double("f_gap", 1.0);

  const ScheduleParams params =
      schedule_from(f.ell, rho, eps, delta, f_gap, f.dim, overrides_from_config(cfg), f.domain_radius);

  OptimOptions opts;
  opts.early_stop = cfg.get_bool("early_stop", true);
  opts.backend = backend_from_string(cfg.get_string("backend", "analytic"));
  opts.pde.mesh = static_cast<int>(cfg.get_int("mesh", 256));
  if (cfg.has("boundary")) opts.pde.boundary = boundary_from_string(cfg.get_string("boundary"));

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(f.dim);
  if (cfg.has("x0")) {
    const std::vector<double> raw = cfg.get_double_list("x0");
    if (static_cast<int>(raw.size()) != f.dim) throw ConfigError("x0 has the wrong dimension");
    x0 = Eigen::Map<const Eigen::VectorXd>(raw.data(), f.dim);
  }

  Rng rng(args.seed);
  Trajectory traj;
  if (algorithm == "gd") {
    OptimOptions gd_opts = opts;
    ScheduleParams gd_params = params;
    gd_params.eps = -1.0;  // perturbation never triggers
    traj = pgd_qs(f, x0, gd_params, rng, gd_opts);
  } else if (algorithm == "pgd") {
    traj = pgd_classical(f, x0, params, cfg.get_double("r", 0.5), rng, opts);
  } else if (algorithm == "pgd_qs") {
    traj = pgd_qs(f, x0, params, rng, opts);
  } else if (algorithm == "pagd_qs") {
    traj = pagd_qs(f, x0, params, rng, opts);
  } else if (algorithm == "pgd_jordan") {
    NoisyGradientModel model;
    model.ell = f.ell;
    model.n = f.dim;
    model.delta_q = cfg.has("delta_q")
                        ? cfg.get_double("delta_q")
                        : (1.0 / (2.0 * f.ell)) *
                              std::pow(delta * eps / (1000.0 * f.dim * f.dim), 2);
    traj = pgd_jordan(f, x0, params, model, rng, opts);
  } else {
    throw ConfigError("unknown algorithm: " + algorithm);
  }

  std::filesystem::create_directories(args.out_dir);
  trajectory_to_csv(traj, args.out_dir + "/trajectory.csv");
  std::cout << "iterations=" << traj.iterations() << " final_f=" << format_double(traj.f_values.back())
            << " events=" << traj.events.size() << (traj.certified ? " certified" : "") << '\n';
  return 0;
}

int run_bench(const CommonArgs& args) {
  const Config cfg = load_config(args);
  std::filesystem::create_directories(args.out_dir);
  const std::string kind = cfg.get_string("kind", "minibatch_compare");
  if (kind == "minibatch_compare") {
    const HistogramResult hist = run_minibatch_compare(cfg, args.seed);
    emit_histogram_csv(hist, args.out_dir + "/hist.csv");
    emit_values_csv(hist, args.out_dir + "/values.csv");
    emit_summary_csv(hist, args.out_dir + "/summary.csv");
    std::cout << "classical escape=" << format_double(hist.classical.escape_fraction)
              << " quantum escape=" << format_double(hist.quantum.escape_fraction) << '\n';
    return 0;
  }
  if (kind == "dimension_sweep") {
    for (const auto& [n, hist] : run_dimension_sweep(cfg, args.seed)) {
      const std::string prefix = args.out_dir + "/n" + std::to_string(n);
      emit_histogram_csv(hist, prefix + "_hist.csv");
      emit_values_csv(hist, prefix + "_values.csv");
      emit_summary_csv(hist, prefix + "_summary.csv");
      std::cout << "n=" << n << " classical median=" << format_double(hist.classical.median)
                << " quantum median=" << format_double(hist.quantum.median) << '\n';
    }
    return 0;
  }
  throw ConfigError("unknown bench kind: " + kind);
}

bool check(bool ok, const std::string& label, int& failures) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << label << '\n';
  if (!ok) ++failures;
  return ok;
}

int run_validate(const CommonArgs& args) {
  int failures = 0;

  // Variance-law bounds on a dense (t, lambda) grid.
  {
    bool lower_ok = true, band_ok = true, cont_ok = true;
    for (int i = 0; i < 100; ++i) {
      const double t = 10.0 * i / 99.0;
      cont_ok = cont_ok && std::abs(variance_sigma2(t, 1e-8) - (1.0 + 0.25 * t * t)) <= 1e-6 &&
                std::abs(variance_sigma2(t, -1e-8) - (1.0 + 0.25 * t * t)) <= 1e-6;
      for (int j = 1; j <= 100; ++j) {
        const double lam = 3.0 * j / 100.0;
        const double alpha = std::sqrt(lam);
        const double s_pos = std::sqrt(variance_sigma2(t, lam));
        band_ok = band_ok && s_pos >= std::min(1.0, 1.0 / (2.0 * alpha)) - 1e-12 &&
                  s_pos <= std::max(1.0, 1.0 / (2.0 * alpha)) + 1e-12;
        const double s_neg = std::sqrt(variance_sigma2(t, -lam));
        const double phi = std::sinh(alpha * t) / (2.0 * alpha) + std::cosh(alpha * t);
        lower_ok = lower_ok && variance_sigma2(t, -lam) >= 1.0 + 0.25 * t * t - 1e-9 &&
                   s_neg >= phi / std::sqrt(2.0) - 1e-12 && s_neg <= phi + 1e-12;
      }
    }
    check(lower_ok, "variance law: negative-curvature bounds", failures);
    check(band_ok, "variance law: positive-curvature band", failures);
    check(cont_ok, "variance law: branch continuity at lambda = 0", failures);
  }

  // Built-in landscapes against finite differences.
  for (const Landscape& f : {make_quad2d(), make_quartic2d(), make_cubic2d(),
                             make_diagquad(5, 0.01), make_shifted_quad1d(-1.0, 0.1)}) {
    Rng rng(args.seed);
    const double box = f.domain_radius.value_or(1.0);
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      Eigen::VectorXd x(f.dim);
      for (int d = 0; d < f.dim; ++d) x[d] = (2.0 * rng.uniform() - 1.0) * box;
      const Eigen::VectorXd g = gradient(f, x);
      for (int d = 0; d < f.dim; ++d) {
        Eigen::VectorXd xp = x, xm = x;
        const double h = 1e-5 * std::max(1.0, std::abs(x[d]));
        xp[d] += h;
        xm[d] -= h;
        const double fd = (evaluate(f, xp) - evaluate(f, xm)) / (2.0 * h);
        ok = ok && std::abs(fd - g[d]) <= 1e-5 * std::max(1.0, std::abs(fd));
      }
    }
    check(ok, "landscape gradient matches finite differences: " + f.name, failures);
  }

  // Discrete Hamiltonian symmetry on a small grid; norm conservation at the
  // experiment resolution (coarser grids oscillate more, see README).
  {
    const Landscape f = make_quad2d();
    const GridSpec small = build_grid(2, 3.0, 64, Boundary::dirichlet);
    const DiscreteHamiltonian h_small =
        discretize(small, [&f](const Eigen::VectorXd& x) { return evaluate(f, x); }, 0.5);
    Rng rng(args.seed);
    bool sym_ok = true;
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd u = rng.normal_vector(static_cast<Eigen::Index>(small.size()));
      const Eigen::VectorXd v = rng.normal_vector(static_cast<Eigen::Index>(small.size()));
      sym_ok = sym_ok && std::abs(u.dot(h_small.apply(v)) - v.dot(h_small.apply(u))) <=
                             1e-10 * std::max(1.0, std::abs(u.dot(h_small.apply(v))));
    }
    check(sym_ok, "discrete Hamiltonian is symmetric", failures);

    const GridSpec grid = build_grid(2, 3.0, 256, Boundary::dirichlet);
    const DiscreteHamiltonian h =
        discretize(grid, [&f](const Eigen::VectorXd& x) { return evaluate(f, x); }, 0.5);
    WaveState state = initial_gaussian(grid, Eigen::VectorXd::Zero(2), 0.5);
    state = evolve(h, std::move(state), 1.0, 0.0);
    check(std::abs(state.norm() - 1.0) <= 1e-6, "norm conservation over t = 1", failures);
  }

  std::cout << (failures == 0 ? "all checks passed" : "checks FAILED") << '\n';
  return failures == 0 ? 0 : kExitNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave-packet-perturbed descent toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--seed", args.seed, "base random seed");
    cmd->add_option("--profile", args.profile, "ci or paper defaults");
    cmd->add_option("--out", args.out_dir, "output directory");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "wave-packet dispersion / evolution");
  CLI::App* escape = app.add_subcommand("escape", "single optimizer trajectory");
  CLI::App* bench = app.add_subcommand("bench", "comparison experiments");
  CLI::App* validate = app.add_subcommand("validate", "numerical invariant checks");
  for (CLI::App* cmd : {simulate, escape, bench, validate}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(args);
    if (escape->parsed()) return run_escape(args);
    if (bench->parsed()) return run_bench(args);
    if (validate->parsed()) return run_validate(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  }
  return 0;
}
