#include "vexbayes/abc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/numeric.hpp"

namespace vexbayes::abc {

double discrepancy(std::span<const double> sim, std::span<const double> obs) {
    require(sim.size() == obs.size(), "invalid-summary", "summary vector lengths differ");
    double ss = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double d = sim[i] - obs[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

PriorPredictiveSet run_prior_predictive(const ModelHooks& model, std::size_t n,
                                        std::size_t workers, std::size_t block_width,
                                        std::uint64_t seed, std::span<const double> observed) {
    require(n >= 1, "invalid-shape", "need at least one prior predictive sample");
    require(workers >= 1, "invalid-shape", "need at least one worker");
    require(observed.size() == model.summary_dim, "invalid-summary",
            "observed summary length differs from the model summary dimension");

    PriorPredictiveSet set;
    set.rows = n;
    set.dim = model.dim;
    set.summary_dim = model.summary_dim;
    set.params.assign(n * model.dim, 0.0);
    set.summaries.assign(n * model.summary_dim, 0.0);
    set.discrepancies.assign(n, std::numeric_limits<double>::quiet_NaN());
    set.failed.assign(n, 0);

    const WorkPartition part = partition(n, workers, block_width);

    auto body = [&](std::size_t w) {
        const auto [begin, end] = part.ranges[w];
        RngStream stream(seed, static_cast<std::uint32_t>(w));
        for (std::size_t row = begin; row < end; ++row) {
            std::span<double> theta(set.params.data() + row * model.dim, model.dim);
            std::span<double> summary(set.summaries.data() + row * model.summary_dim,
                                      model.summary_dim);
            model.sample_prior(stream, theta);
            stream.align_even();
            try {
                model.simulate(theta, stream, block_width, summary);
                set.discrepancies[row] = discrepancy(summary, observed);
            } catch (const Error&) {
                set.failed[row] = 1;
                std::fill(summary.begin(), summary.end(), 0.0);
            }
        }
    };

    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    }
    return set;
}

EpsilonSelection select_epsilon(const PriorPredictiveSet& set, double accept_fraction) {
    require(accept_fraction > 0.0 && accept_fraction <= 1.0, "invalid-argument",
            "accept fraction must lie in (0, 1]");
    std::vector<double> rho;
    rho.reserve(set.rows);
    for (std::size_t r = 0; r < set.rows; ++r) {
        if (!set.failed[r]) rho.push_back(set.discrepancies[r]);
    }
    require(!rho.empty(), "empty-set", "every prior predictive row failed");

    std::sort(rho.begin(), rho.end());
    double eps = quantile_sorted(rho, accept_fraction);
    const auto min_accept = static_cast<std::size_t>(
        std::ceil(accept_fraction * static_cast<double>(rho.size())));
    if (min_accept >= 1 && eps < rho[min_accept - 1]) eps = rho[min_accept - 1];

    EpsilonSelection sel;
    sel.epsilon = eps;
    for (std::size_t r = 0; r < set.rows; ++r) {
        if (!set.failed[r] && set.discrepancies[r] <= eps) sel.accepted.push_back(r);
    }
    return sel;
}

void write_csv(const PriorPredictiveSet& set, std::ostream& out) {
    out << "row";
    for (std::size_t k = 0; k < set.dim; ++k) out << ",theta_" << (k + 1);
    for (std::size_t k = 0; k < set.summary_dim; ++k) out << ",s_" << (k + 1);
    out << ",rho,failed\n";
    char buf[64];
    const auto cell = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (std::size_t r = 0; r < set.rows; ++r) {
        out << r;
        for (std::size_t k = 0; k < set.dim; ++k) cell(set.params[r * set.dim + k]);
        for (std::size_t k = 0; k < set.summary_dim; ++k)
            cell(set.summaries[r * set.summary_dim + k]);
        cell(set.discrepancies[r]);
        out << ',' << static_cast<int>(set.failed[r]) << '\n';
    }
}

void write_csv(const PriorPredictiveSet& set, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "io-error", "cannot open " + path + " for writing");
    write_csv(set, out);
    require(out.good(), "io-error", "write to " + path + " failed");
}

}  // namespace vexbayes::abc
