#include "vexbayes/tb_model.hpp"

#include <algorithm>
#include <array>

#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"

namespace vexbayes::tb {

namespace {

// Suffix update of the cumulative lookup array, processed in blocks of
// block_width lanes. Counts are small integers held in doubles, so the
// update is exact for any block width.
void cumulative_suffix_add(std::vector<double>& cum, std::size_t from, double delta,
                           std::size_t block_width) {
    const std::size_t n = cum.size();
    double* c = cum.data();
    std::size_t i = from;
    for (; i + block_width <= n; i += block_width) {
#pragma omp simd
        for (std::size_t l = 0; l < block_width; ++l) c[i + l] += delta;
    }
    for (; i < n; ++i) c[i] += delta;
}

std::size_t lookup_genotype(const std::vector<double>& cum, double target) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace

Propensities propensities(const TbState& state, const TbParams& theta) {
    return {theta.alpha * state.total, theta.delta * state.total, theta.tau * state.total};
}

TbState gillespie_simulate(const TbParams& theta, std::size_t initial_cases, StopRule stop,
                           RngStream& stream, std::size_t block_width,
                           std::vector<TbEvent>* trace) {
    require(initial_cases >= 1, "invalid-shape", "need at least one initial case");
    require(theta.alpha >= 0 && theta.delta >= 0 && theta.tau >= 0, "invalid-argument",
            "rates must be nonnegative");

    TbState state;
    state.counts.assign(1, static_cast<double>(initial_cases));
    state.total = static_cast<double>(initial_cases);
    state.genotypes = 1;

    std::vector<double> cum = state.counts;
    std::size_t zero_slots = 0;

    while (state.time < stop.time_horizon && state.total < stop.case_target && state.total > 0) {
        const Propensities a = propensities(state, theta);
        const double rate = a.total();
        if (rate <= 0.0) {
            state.time = stop.time_horizon;
            break;
        }
        const double wait = -fastmath::ln_pos(1.0 - stream.next_unit()) / rate;
        if (state.time + wait > stop.time_horizon) {
            state.time = stop.time_horizon;
            break;
        }
        state.time += wait;

        const double kind_draw = stream.next_unit() * rate;
        const double geno_draw = stream.next_unit() * state.total;
        const std::size_t idx = lookup_genotype(cum, geno_draw);

        TbEvent::Kind kind;
        if (kind_draw < a.birth) {
            kind = TbEvent::Kind::birth;
            state.counts[idx] += 1.0;
            state.total += 1.0;
            cumulative_suffix_add(cum, idx, 1.0, block_width);
        } else if (kind_draw < a.birth + a.death) {
            kind = TbEvent::Kind::death;
            state.counts[idx] -= 1.0;
            state.total -= 1.0;
            cumulative_suffix_add(cum, idx, -1.0, block_width);
            if (state.counts[idx] == 0.0) {
                --state.genotypes;
                ++zero_slots;
            }
        } else {
            kind = TbEvent::Kind::mutation;
            state.counts[idx] -= 1.0;
            cumulative_suffix_add(cum, idx, -1.0, block_width);
            if (state.counts[idx] == 0.0) {
                --state.genotypes;
                ++zero_slots;
            }
            state.counts.push_back(1.0);
            cum.push_back(state.total);
            ++state.genotypes;
        }

        if (trace) trace->push_back({kind, state.time, state.total, state.genotypes});

        if (zero_slots > 64 && zero_slots > state.counts.size() / 2) {
            std::erase(state.counts, 0.0);
            cum.resize(state.counts.size());
            double running = 0.0;
            for (std::size_t i = 0; i < state.counts.size(); ++i) {
                running += state.counts[i];
                cum[i] = running;
            }
            zero_slots = 0;
        }
    }

    std::erase(state.counts, 0.0);
    return state;
}

TbSummaries tb_summaries(const TbState& state) {
    require(state.total >= 1.0, "extinct-population", "summaries need a surviving population");
    const double n = state.total;
    const double* counts = state.counts.data();
    const std::size_t g = state.counts.size();
    double ss = 0.0;
#pragma omp simd reduction(+ : ss)
    for (std::size_t i = 0; i < g; ++i) ss += counts[i] * counts[i];
    return {static_cast<double>(state.genotypes), 1.0 - ss / (n * n)};
}

TbState make_state(std::vector<double> counts, double time) {
    TbState state;
    state.counts = std::move(counts);
    state.time = time;
    for (double c : state.counts) {
        state.total += c;
        if (c >= 1.0) ++state.genotypes;
    }
    return state;
}

TbParams sample_prior(RngStream& stream) {
    const double alpha = stream.next_uniform(0.0, 2.0);
    const double delta = stream.next_uniform(0.0, alpha);
    const double tau = stream.next_uniform(0.0, 1.0);
    return {alpha, delta, tau};
}

ModelHooks make_abc_model(std::size_t initial_cases, StopRule stop) {
    ModelHooks hooks;
    hooks.dim = 3;
    hooks.summary_dim = 2;
    hooks.sample_prior = [](RngStream& stream, std::span<double> out) {
        const TbParams theta = sample_prior(stream);
        out[0] = theta.alpha;
        out[1] = theta.delta;
        out[2] = theta.tau;
    };
    hooks.simulate = [initial_cases, stop](std::span<const double> theta, RngStream& stream,
                                           std::size_t block_width, std::span<double> out) {
        const TbState state = gillespie_simulate({theta[0], theta[1], theta[2]}, initial_cases,
                                                 stop, stream, block_width);
        const TbSummaries s = tb_summaries(state);
        out[0] = s.genotypes;
        out[1] = s.diversity;
    };
    return hooks;
}

}  // namespace vexbayes::tb
