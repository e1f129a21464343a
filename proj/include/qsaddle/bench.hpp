#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsaddle/config.hpp"
#include "qsaddle/landscape.hpp"
#include "qsaddle/wavesim.hpp"

namespace qsaddle {

// Wave-packet dispersion run: evolve once, record marginal variances at the
// requested times, optionally dump a full snapshot per time.
struct DispersionResult {
  std::vector<double> times;
  std::vector<std::vector<double>> variances;  // [time][axis]
  std::vector<std::vector<double>> means;      // [time][axis]
};

DispersionResult run_dispersion(const Config& cfg, const std::string& out_dir = "");

struct ArmSummary {
  double mean = 0.0;
  double median = 0.0;
  double escape_fraction = 0.0;
};

// Final objective values of the classical and quantum mini-batch arms, both
// binned jointly and kept raw so every summary number can be recomputed from
// the emitted CSV.
struct HistogramResult {
  std::vector<double> bin_edges;
  std::vector<long long> counts_classical;
  std::vector<long long> counts_quantum;
  std::vector<double> f_classical;
  std::vector<double> f_quantum;
  double threshold = 0.0;
  ArmSummary classical;
  ArmSummary quantum;
};

// Classical arm: uniform-ball start, T_c descent steps. Quantum arm:
// wave-packet-measured start, T_q descent steps. One sample per seed
// base + index, so per-sample results do not depend on the batch size.
HistogramResult run_minibatch_compare(const Config& cfg, std::uint64_t seed);

// Same comparison on diagquad for n = 10^p: the quantum arm starts from the
// closed-form evolved law with t_e = p and runs 30 p steps; the classical arm
// starts uniform in a ball and runs 50 p^2 + 50 steps.
std::vector<std::pair<int, HistogramResult>> run_dimension_sweep(const Config& cfg,
                                                                 std::uint64_t seed);

void emit_dispersion_csv(const DispersionResult& result, const std::string& path);
void emit_histogram_csv(const HistogramResult& result, const std::string& path);
void emit_values_csv(const HistogramResult& result, const std::string& path);
void emit_summary_csv(const HistogramResult& result, const std::string& path);

double median_of(std::vector<double> values);

}  // namespace qsaddle
