#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vexbayes/tb_model.hpp"

namespace vexbayes::bench {

enum class Experiment { toggle_abc, weakinfo, bege, tb };
enum class Mode { scalar, blocked };

std::string to_string(Experiment e);
std::string to_string(Mode m);
Experiment experiment_from_string(const std::string& name);  // invalid-input
Mode mode_from_string(const std::string& name);              // invalid-input

/// One timing measurement. The runtime covers the experiment body only;
/// setup and IO are excluded.
struct BenchmarkRecord {
    Experiment experiment;
    Mode mode;
    std::size_t threads;
    std::size_t block_width;
    std::size_t replicate;
    double runtime_seconds;
    bool failed;
};

struct ExperimentSizes {
    std::size_t samples = 64;    // prior predictive draws (toggle-abc, tb)
    std::size_t cells = 256;     // toggle C
    std::size_t steps = 100;     // toggle T
    std::size_t particles = 200; // SMC N_p
    std::size_t hypers = 2;      // weak-info K
    std::size_t datasets = 8;    // weak-info N
    std::size_t months = 64;     // bege series length
    std::size_t tb_initial = 10;
    double tb_horizon = 10.0;
    double tb_target = 10000.0;
};

struct BenchConfig {
    Experiment experiment = Experiment::toggle_abc;
    std::vector<std::size_t> threads = {1, 2, 4, 8, 16};
    std::vector<std::size_t> block_widths = {1, 4, 8};
    std::size_t replicates = 4;
    std::uint64_t seed = 1337;
    ExperimentSizes sizes;
    bool warmup = true;  // one discarded replicate per cell
};

/// Amdahl speedup bound (C_S + C_P)/(C_S + C_P/P). Errors with invalid-input
/// when both runtimes are zero or negative, or P < 1.
double amdahl_bound(double serial_seconds, double parallel_seconds, double units);

/// Synthetic observed summaries for the ABC demos (documented true
/// parameters: toggle uses the prior midpoints, tb uses
/// (alpha, delta, tau) = (0.2, 0.1, 0.05)).
std::vector<double> toggle_observed_summaries(std::size_t steps, std::size_t cells,
                                              std::uint64_t seed, std::size_t block_width);
std::vector<double> tb_observed_summaries(std::size_t initial_cases, tb::StopRule stop,
                                          std::uint64_t seed, std::size_t block_width);

/// Runs one experiment body (no output) with the given parallelism.
void run_experiment_once(Experiment experiment, const ExperimentSizes& sizes,
                         std::size_t threads, std::size_t block_width, std::uint64_t seed);

/// Wall-clocks every (mode, threads, block width, replicate) cell of the
/// config in deterministic order. Failures are recorded with a NaN runtime
/// and the failed flag instead of aborting the sweep.
std::vector<BenchmarkRecord> run_benchmark(const BenchConfig& config);

struct SummaryRow {
    Experiment experiment;
    Mode mode;
    std::size_t threads;
    std::size_t block_width;
    double mean_runtime;
    double speedup_vs_baseline;  // baseline: scalar, threads=1
};

/// Per-cell means over non-failed replicates plus the speedup against the
/// (scalar, P=1) baseline cell.
std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records);

/// Records section followed by the summary section; times at 6 significant
/// digits.
void write_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out);
void write_csv(const std::vector<BenchmarkRecord>& records, const std::string& path);

/// Parses the records section written by write_csv.
std::vector<BenchmarkRecord> parse_csv(std::istream& in);

}  // namespace vexbayes::bench
