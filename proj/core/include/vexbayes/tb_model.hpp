#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "vexbayes/model.hpp"
#include "vexbayes/rng.hpp"

namespace vexbayes::tb {

/// theta = (alpha, delta, tau): per-case birth, death and mutation rates.
struct TbParams {
    double alpha;
    double delta;
    double tau;
};

/// Multi-genotype case counts. Zero-count slots may exist internally between
/// compactions; genotypes counts only X_i >= 1 and total == sum X_i.
struct TbState {
    std::vector<double> counts;
    double time = 0.0;
    double total = 0.0;
    std::size_t genotypes = 0;
};

struct Propensities {
    double birth;
    double death;
    double mutation;
    double total() const { return birth + death + mutation; }
};

Propensities propensities(const TbState& state, const TbParams& theta);

/// Simulation stops at whichever comes first: the time horizon, the case
/// target, or extinction.
struct StopRule {
    double time_horizon = 50.0;
    double case_target = 10000.0;
};

struct TbEvent {
    enum class Kind { birth, death, mutation };
    Kind kind;
    double time;
    double cases;       // N after the event
    std::size_t genotypes;  // G after the event
};

/// Gillespie direct method: exponential waiting times at the total rate,
/// event category by one uniform, genotype by inverse-CDF lookup over the
/// cumulative count array (the cumulative update runs in blocks of
/// block_width lanes). A mutation converts one existing case into a case of
/// a brand-new genotype. Requires initial_cases >= 1.
TbState gillespie_simulate(const TbParams& theta, std::size_t initial_cases, StopRule stop,
                           RngStream& stream, std::size_t block_width = 4,
                           std::vector<TbEvent>* trace = nullptr);

struct TbSummaries {
    double genotypes;  // G
    double diversity;  // H = 1 - sum (X_i/N)^2
};

/// Errors with extinct-population when N == 0.
TbSummaries tb_summaries(const TbState& state);

/// Builds a consistent state (total, genotype count) from raw counts.
TbState make_state(std::vector<double> counts, double time = 0.0);

/// ABC prior: alpha ~ U(0,2), delta ~ U(0,alpha), tau ~ U(0,1), in that order.
TbParams sample_prior(RngStream& stream);

/// ABC hooks: summaries are (G, H).
ModelHooks make_abc_model(std::size_t initial_cases, StopRule stop);

inline constexpr double kNoHorizon = std::numeric_limits<double>::infinity();

}  // namespace vexbayes::tb
