#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "vexbayes/rng.hpp"

namespace vexbayes {

/// The contract a model exposes to the samplers. ABC sampling needs
/// sample_prior + simulate (data reduced to summary statistics); SMC needs
/// sample_prior + log_prior + the likelihood pair. Hooks a model does not
/// support stay empty.
///
/// block_log_likelihood evaluates `lanes` parameter vectors stored row-major
/// (lane l's parameters at params[l*dim .. l*dim+dim)) and must match scalar
/// log_likelihood lane-wise.
struct ModelHooks {
    std::size_t dim = 0;
    std::size_t summary_dim = 0;

    /// Writes dim parameters drawn from the prior.
    std::function<void(RngStream&, std::span<double>)> sample_prior;

    /// Simulates data for theta and writes summary_dim summary statistics.
    /// block_width is the kernel width the simulator should run with.
    std::function<void(std::span<const double> theta, RngStream&, std::size_t block_width,
                       std::span<double> summaries)>
        simulate;

    std::function<double(std::span<const double> theta)> log_prior;
    std::function<double(std::span<const double> theta)> log_likelihood;
    std::function<void(std::span<const double> params, std::size_t lanes, std::span<double> out)>
        block_log_likelihood;
};

}  // namespace vexbayes
