#include "vexbayes/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vexbayes/abc.hpp"
#include "vexbayes/bege.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/toggle_switch.hpp"
#include "vexbayes/weak_info.hpp"

namespace vexbayes::bench {

namespace {

constexpr const char* kRecordHeader =
    "experiment,mode,threads,block_width,replicate,runtime_seconds,failed";
constexpr const char* kSummaryHeader =
    "experiment,mode,threads,block_width,mean_runtime,speedup_vs_baseline";

std::string format_time(double seconds) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", seconds);
    return buf;
}

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::toggle_abc: return "toggle-abc";
        case Experiment::weakinfo: return "weakinfo";
        case Experiment::bege: return "bege";
        case Experiment::tb: return "tb";
    }
    raise("invalid-input", "unknown experiment enum value");
}

std::string to_string(Mode m) { return m == Mode::scalar ? "scalar" : "blocked"; }

Experiment experiment_from_string(const std::string& name) {
    if (name == "toggle-abc") return Experiment::toggle_abc;
    if (name == "weakinfo") return Experiment::weakinfo;
    if (name == "bege") return Experiment::bege;
    if (name == "tb") return Experiment::tb;
    raise("invalid-input", "unknown experiment: " + name);
}

Mode mode_from_string(const std::string& name) {
    if (name == "scalar") return Mode::scalar;
    if (name == "blocked") return Mode::blocked;
    raise("invalid-input", "unknown mode: " + name);
}

double amdahl_bound(double serial_seconds, double parallel_seconds, double units) {
    require(serial_seconds >= 0.0 && parallel_seconds >= 0.0, "invalid-input",
            "runtimes must be nonnegative");
    require(serial_seconds + parallel_seconds > 0.0, "invalid-input",
            "total runtime must be positive");
    require(units >= 1.0, "invalid-input", "need at least one processing unit");
    return (serial_seconds + parallel_seconds) / (serial_seconds + parallel_seconds / units);
}

std::vector<double> toggle_observed_summaries(std::size_t steps, std::size_t cells,
                                              std::uint64_t seed, std::size_t block_width) {
    // documented true parameters: the prior midpoints
    const toggle::ToggleParams theta{325.0, 0.275, 0.2, 25.0, 25.0, 3.5, 3.5};
    RngStream stream(derive_seed(seed, {90}), 0);
    const auto obs = toggle::simulate(theta, steps, cells, stream, block_width);
    const auto q = toggle::summary_quantiles(obs);
    return {q.begin(), q.end()};
}

std::vector<double> tb_observed_summaries(std::size_t initial_cases, tb::StopRule stop,
                                          std::uint64_t seed, std::size_t block_width) {
    const tb::TbParams theta{0.2, 0.1, 0.05};
    RngStream stream(derive_seed(seed, {91}), 0);
    for (std::size_t attempt = 0; attempt < 64; ++attempt) {
        const tb::TbState state =
            tb::gillespie_simulate(theta, initial_cases, stop, stream, block_width);
        if (state.total >= 1.0) {
            const tb::TbSummaries s = tb::tb_summaries(state);
            return {s.genotypes, s.diversity};
        }
    }
    raise("empty-set", "synthetic tb population kept going extinct");
}

void run_experiment_once(Experiment experiment, const ExperimentSizes& sizes,
                         std::size_t threads, std::size_t block_width, std::uint64_t seed) {
    switch (experiment) {
        case Experiment::toggle_abc: {
            const auto observed =
                toggle_observed_summaries(sizes.steps, sizes.cells, seed, block_width);
            const auto model = toggle::make_abc_model(sizes.steps, sizes.cells);
            abc::run_prior_predictive(model, sizes.samples, threads, block_width, seed, observed);
            return;
        }
        case Experiment::tb: {
            const tb::StopRule stop{sizes.tb_horizon, sizes.tb_target};
            const auto observed =
                tb_observed_summaries(sizes.tb_initial, stop, seed, block_width);
            const auto model = tb::make_abc_model(sizes.tb_initial, stop);
            abc::run_prior_predictive(model, sizes.samples, threads, block_width, seed, observed);
            return;
        }
        case Experiment::weakinfo: {
            weakinfo::WeakInfoConfig config;
            config.hyper_count = sizes.hypers;
            config.datasets = sizes.datasets;
            config.particles = sizes.particles;
            config.workers = threads;
            config.block_width = block_width;
            config.seed = seed;
            weakinfo::run_weak_info_test(config);
            return;
        }
        case Experiment::bege: {
            const bege::BegeParams theta{0.01, 0.02, 0.9,  0.1,  0.2, 0.05,
                                         0.04, 0.85, 0.05, 0.3,  0.005};
            RngStream stream(derive_seed(seed, {92}), 0);
            const auto series = bege::simulate(theta, sizes.months, stream);
            bege::InferenceConfig config;
            config.particles = sizes.particles;
            config.workers = threads;
            config.block_width = block_width;
            config.seed = seed;
            bege::run_inference(series.returns, config);
            return;
        }
    }
    raise("invalid-input", "unknown experiment enum value");
}

std::vector<BenchmarkRecord> run_benchmark(const BenchConfig& config) {
    require(config.replicates >= 1, "invalid-input", "need at least one replicate");
    require(!config.threads.empty() && !config.block_widths.empty(), "invalid-input",
            "thread and block-width lists must not be empty");

    std::vector<BenchmarkRecord> records;
    records.reserve(config.block_widths.size() * config.threads.size() * config.replicates);
    for (std::size_t v : config.block_widths) {
        const Mode mode = v == 1 ? Mode::scalar : Mode::blocked;
        for (std::size_t p : config.threads) {
            if (config.warmup) {
                try {
                    run_experiment_once(config.experiment, config.sizes, p, v, config.seed);
                } catch (const std::exception&) {
                }
            }
            for (std::size_t rep = 0; rep < config.replicates; ++rep) {
                BenchmarkRecord record{config.experiment, mode, p, v, rep, 0.0, false};
                const auto start = std::chrono::steady_clock::now();
                try {
                    run_experiment_once(config.experiment, config.sizes, p, v, config.seed);
                    const auto stop = std::chrono::steady_clock::now();
                    record.runtime_seconds = std::chrono::duration<double>(stop - start).count();
                } catch (const std::exception&) {
                    record.runtime_seconds = std::numeric_limits<double>::quiet_NaN();
                    record.failed = true;
                }
                records.push_back(record);
            }
        }
    }
    return records;
}

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records) {
    std::vector<SummaryRow> rows;
    for (const BenchmarkRecord& r : records) {
        bool found = false;
        for (SummaryRow& row : rows) {
            if (row.experiment == r.experiment && row.mode == r.mode &&
                row.threads == r.threads && row.block_width == r.block_width) {
                found = true;
                break;
            }
        }
        if (!found) {
            rows.push_back({r.experiment, r.mode, r.threads, r.block_width, 0.0, 0.0});
        }
    }
    for (SummaryRow& row : rows) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const BenchmarkRecord& r : records) {
            if (row.experiment == r.experiment && row.mode == r.mode &&
                row.threads == r.threads && row.block_width == r.block_width && !r.failed) {
                sum += r.runtime_seconds;
                ++n;
            }
        }
        row.mean_runtime = n ? sum / static_cast<double>(n)
                             : std::numeric_limits<double>::quiet_NaN();
    }
    double baseline = std::numeric_limits<double>::quiet_NaN();
    for (const SummaryRow& row : rows) {
        if (row.mode == Mode::scalar && row.threads == 1) {
            baseline = row.mean_runtime;
            break;
        }
    }
    for (SummaryRow& row : rows) {
        row.speedup_vs_baseline = baseline / row.mean_runtime;
    }
    return rows;
}

void write_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out) {
    out << kRecordHeader << '\n';
    for (const BenchmarkRecord& r : records) {
        out << to_string(r.experiment) << ',' << to_string(r.mode) << ',' << r.threads << ','
            << r.block_width << ',' << r.replicate << ',' << format_time(r.runtime_seconds)
            << ',' << (r.failed ? 1 : 0) << '\n';
    }
    out << kSummaryHeader << '\n';
    for (const SummaryRow& row : summarize(records)) {
        out << to_string(row.experiment) << ',' << to_string(row.mode) << ',' << row.threads
            << ',' << row.block_width << ',' << format_time(row.mean_runtime) << ','
            << format_time(row.speedup_vs_baseline) << '\n';
    }
}

void write_csv(const std::vector<BenchmarkRecord>& records, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "io-error", "cannot open " + path + " for writing");
    write_csv(records, out);
    require(out.good(), "io-error", "write to " + path + " failed");
}

std::vector<BenchmarkRecord> parse_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "io-error", "empty benchmark file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == kRecordHeader, "io-error", "unexpected benchmark header: " + line);

    std::vector<BenchmarkRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == kSummaryHeader) break;
        std::istringstream row(line);
        std::string experiment, mode, field;
        require(static_cast<bool>(std::getline(row, experiment, ',')) &&
                    static_cast<bool>(std::getline(row, mode, ',')),
                "io-error", "malformed benchmark row: " + line);
        BenchmarkRecord r{};
        r.experiment = experiment_from_string(experiment);
        r.mode = mode_from_string(mode);
        const auto next_field = [&]() {
            require(static_cast<bool>(std::getline(row, field, ',')), "io-error",
                    "malformed benchmark row: " + line);
            return field;
        };
        r.threads = std::stoull(next_field());
        r.block_width = std::stoull(next_field());
        r.replicate = std::stoull(next_field());
        r.runtime_seconds = std::stod(next_field());
        r.failed = std::stoi(next_field()) != 0;
        records.push_back(r);
    }
    return records;
}

}  // namespace vexbayes::bench
