#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qsaddle/bench.hpp"
#include "qsaddle/csv.hpp"

using namespace qsaddle;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("qsaddle_test_" + tag);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("median helper") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median_of({}) == 0.0);
}

TEST_CASE("dispersion run records the reported variances") {
  const Config cfg = Config::from_string(
      "landscape = quad2d\nr0 = 0.5\nhalf_width = 3\nmesh = 128\n"
      "boundary = dirichlet\ndt = auto\nsnapshot_times = 0, 0.5, 1\n");
  const DispersionResult result = run_dispersion(cfg);
  REQUIRE(result.times.size() == 3);
  CHECK(result.variances[0][0] == doctest::Approx(0.25).epsilon(0.03));
  CHECK(std::abs(result.variances[1][0] - 0.33) <= 0.03);
  CHECK(std::abs(result.variances[2][0] - 0.68) <= 0.03);
  CHECK(result.variances[0][1] == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("dispersion snapshots and series land on disk") {
  const auto dir = temp_dir("dispersion");
  const Config cfg = Config::from_string(
      "landscape = quad2d\nr0 = 0.5\nhalf_width = 2\nmesh = 32\nsnapshot_times = 0, 0.2\n");
  const DispersionResult result = run_dispersion(cfg, dir.string());
  emit_dispersion_csv(result, (dir / "dispersion.csv").string());
  CHECK(std::filesystem::exists(dir / "snapshot_t0.csv"));
  CHECK(std::filesystem::exists(dir / "snapshot_t0.2.csv"));
  const std::string series = slurp((dir / "dispersion.csv").string());
  CHECK(series.rfind("t,var_x0,var_x1,mean_x0,mean_x1\n", 0) == 0);
}

TEST_CASE("single-sample smoke run") {
  Config cfg = Config::from_string(
      "landscape = quartic2d\nsamples = 1\nT_c = 5\nT_q = 2\nt_e = 0.5\nbackend = analytic\n"
      "bins = 4\n");
  const HistogramResult hist = run_minibatch_compare(cfg, 7);
  CHECK(hist.f_classical.size() == 1);
  CHECK(hist.f_quantum.size() == 1);
  long long total_c = 0, total_q = 0;
  for (std::size_t b = 0; b < hist.counts_classical.size(); ++b) {
    total_c += hist.counts_classical[b];
    total_q += hist.counts_quantum[b];
  }
  CHECK(total_c == 1);
  CHECK(total_q == 1);
}

TEST_CASE("histogram counts sum to the sample count per arm") {
  Config cfg = Config::from_string(
      "landscape = quartic2d\nsamples = 64\nT_c = 10\nT_q = 5\nt_e = 1.0\nbackend = analytic\n");
  const HistogramResult hist = run_minibatch_compare(cfg, 3);
  long long total_c = 0, total_q = 0;
  for (std::size_t b = 0; b < hist.counts_classical.size(); ++b) {
    total_c += hist.counts_classical[b];
    total_q += hist.counts_quantum[b];
  }
  CHECK(total_c == 64);
  CHECK(total_q == 64);
  CHECK(hist.bin_edges.front() <= hist.bin_edges.back());
}

TEST_CASE("per-sample results do not depend on the batch size") {
  Config small = Config::from_string(
      "landscape = quartic2d\nsamples = 3\nT_c = 8\nT_q = 4\nt_e = 1.0\nbackend = analytic\n");
  Config large = Config::from_string(
      "landscape = quartic2d\nsamples = 11\nT_c = 8\nT_q = 4\nt_e = 1.0\nbackend = analytic\n");
  const HistogramResult a = run_minibatch_compare(small, 19);
  const HistogramResult b = run_minibatch_compare(large, 19);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.f_classical[i] == b.f_classical[i]);
    CHECK(a.f_quantum[i] == b.f_quantum[i]);
  }
}

TEST_CASE("threaded and sequential runs agree bitwise") {
  Config seq = Config::from_string(
      "landscape = quartic2d\nsamples = 16\nT_c = 10\nT_q = 5\nt_e = 1.0\nbackend = analytic\n");
  Config par = Config::from_string(
      "landscape = quartic2d\nsamples = 16\nT_c = 10\nT_q = 5\nt_e = 1.0\nbackend = analytic\n"
      "threads = 2\n");
  const HistogramResult a = run_minibatch_compare(seq, 5);
  const HistogramResult b = run_minibatch_compare(par, 5);
  for (int i = 0; i < 16; ++i) {
    CHECK(a.f_classical[i] == b.f_classical[i]);
    CHECK(a.f_quantum[i] == b.f_quantum[i]);
  }
}

TEST_CASE("dimension sweep smoke run") {
  Config cfg = Config::from_string("samples = 2\np_values = 1\n");
  const auto results = run_dimension_sweep(cfg, 4);
  REQUIRE(results.size() == 1);
  CHECK(results[0].first == 10);
  CHECK(results[0].second.f_classical.size() == 2);
}

TEST_CASE("emitted CSVs are byte-identical across reruns and recomputable") {
  const auto dir = temp_dir("csv");
  Config cfg = Config::from_string(
      "landscape = quartic2d\nsamples = 32\nT_c = 10\nT_q = 5\nt_e = 1.0\nbackend = analytic\n");

  std::string first;
  for (int round = 0; round < 2; ++round) {
    const HistogramResult hist = run_minibatch_compare(cfg, 123);
    const auto hist_path = dir / "hist.csv";
    const auto values_path = dir / "values.csv";
    const auto summary_path = dir / "summary.csv";
    emit_histogram_csv(hist, hist_path.string());
    emit_values_csv(hist, values_path.string());
    emit_summary_csv(hist, summary_path.string());
    const std::string combined =
        slurp(hist_path.string()) + slurp(values_path.string()) + slurp(summary_path.string());
    if (round == 0) {
      first = combined;
      // Summary numbers are recomputable from the raw values file.
      long long below = 0;
      for (double v : hist.f_classical) {
        if (v < hist.threshold) ++below;
      }
      CHECK(hist.classical.escape_fraction ==
            doctest::Approx(static_cast<double>(below) / 32.0).epsilon(1e-12));
      CHECK(hist.classical.median == doctest::Approx(median_of(hist.f_classical)).epsilon(1e-12));
    } else {
      CHECK(combined == first);
    }
  }
}

TEST_CASE("config schema is enforced") {
  CHECK_THROWS_AS(run_minibatch_compare(Config::from_string("samples = 0\n"), 1), ConfigError);
  Config bad = Config::from_string("landscape = quartic2d\nsamples = not_a_number\n");
  CHECK_THROWS_AS(run_minibatch_compare(bad, 1), ConfigError);
}

TEST_CASE("float formatting is stable") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
  CHECK(format_double(-1e-9) == "-1e-09");
}
