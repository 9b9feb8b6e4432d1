#include "vexbayes/toggle_switch.hpp"

#include <algorithm>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"
#include "vexbayes/numeric.hpp"

namespace vexbayes::toggle {

ToggleParams ToggleParams::from_span(std::span<const double> v) {
    require(v.size() == kToggleDim, "invalid-argument", "toggle parameter vector needs 7 entries");
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

ToggleParams params_from_unit(std::span<const double> unit) {
    require(unit.size() == kToggleDim, "invalid-argument", "expected 7 unit uniforms");
    return {250.0 + unit[0] * (400.0 - 250.0), 0.05 + unit[1] * (0.5 - 0.05),
            0.05 + unit[2] * (0.35 - 0.05),    unit[3] * 50.0,
            unit[4] * 50.0,                    unit[5] * 7.0,
            unit[6] * 7.0};
}

ToggleParams sample_prior(RngStream& stream) {
    std::array<double, kToggleDim> unit;
    stream.fill_uniform(unit, 0.0, 1.0);
    return params_from_unit(unit);
}

void simulate_block(const ToggleParams& theta, std::size_t steps, CellStateBlock block,
                    std::span<const double> xi, std::span<const double> eta,
                    std::span<double> y_out) {
    require(steps >= 2, "invalid-horizon", "toggle simulation needs at least two time points");
    const std::size_t v_lanes = block.u.size();
    require(block.v.size() == v_lanes && eta.size() == v_lanes && y_out.size() == v_lanes,
            "invalid-shape", "lane counts disagree");
    require(xi.size() == 2 * v_lanes * (steps - 1), "invalid-shape",
            "xi must hold 2*V*(T-1) increments");

    double* u = block.u.data();
    double* v = block.v.data();
    const double alpha_u = theta.alpha_u, alpha_v = theta.alpha_v;
    const double beta_u = theta.beta_u, beta_v = theta.beta_v;

    for (std::size_t j = 1; j < steps; ++j) {
        const double* zu = xi.data() + (j - 1) * 2 * v_lanes;
        const double* zv = zu + v_lanes;
#pragma omp simd
        for (std::size_t l = 0; l < v_lanes; ++l) {
            const double p_u = fastmath::pow_pos(v[l], beta_u);
            const double p_v = fastmath::pow_pos(u[l], beta_v);
            double ut = u[l] * 0.97;
            ut += alpha_u / (1.0 + p_u) - 1.0;
            double vt = v[l] * 0.97;
            vt += alpha_v / (1.0 + p_v) - 1.0;
            ut += 0.5 * zu[l];
            vt += 0.5 * zv[l];
            u[l] = ut >= 1.0 ? ut : 1.0;
            v[l] = vt >= 1.0 ? vt : 1.0;
        }
    }

    const double mu = theta.mu, sigma = theta.sigma, gamma = theta.gamma;
#pragma omp simd
    for (std::size_t l = 0; l < v_lanes; ++l) {
        const double obs = u[l] + mu + sigma * mu * eta[l] / fastmath::pow_pos(u[l], gamma);
        y_out[l] = obs >= 1.0 ? obs : 1.0;
    }
}

ObservationSet simulate(const ToggleParams& theta, std::size_t steps, std::size_t cells,
                        RngStream& stream, std::size_t block_width) {
    require(steps >= 2, "invalid-horizon", "toggle simulation needs at least two time points");
    require(cells >= 1, "invalid-shape", "toggle simulation needs at least one cell");
    require(is_supported_block_width(block_width), "invalid-shape", "unsupported block width");

    const std::size_t v_lanes = block_width;
    const std::size_t padded = (cells + v_lanes - 1) / v_lanes * v_lanes;
    const std::size_t stride = cell_stride(steps);

    stream.align_even();
    const std::uint64_t base_lo = stream.counter_lo();
    const std::uint64_t base_hi = stream.counter_hi();

    BlockedBuffer u(padded, v_lanes), v(padded, v_lanes);
    std::vector<double> canon(v_lanes * stride);
    std::vector<double> xi(2 * v_lanes * (steps - 1));
    std::vector<double> eta(v_lanes);
    std::vector<double> y(padded);

    const auto seek = [&](std::uint64_t offset) {
        const std::uint64_t lo = base_lo + offset;
        stream.set_counter(lo, base_hi + (lo < base_lo ? 1 : 0));
    };

    for (std::size_t b = 0; b * v_lanes < padded; ++b) {
        const std::size_t first_cell = b * v_lanes;
        seek(first_cell * stride);
        stream.fill_gaussian(canon, 0.0, 1.0);
        // canonical per-cell layout -> step-major kernel layout
        for (std::size_t l = 0; l < v_lanes; ++l) {
            const double* cell = canon.data() + l * stride;
            for (std::size_t j = 1; j < steps; ++j) {
                xi[(j - 1) * 2 * v_lanes + l] = cell[2 * (j - 1)];
                xi[(j - 1) * 2 * v_lanes + v_lanes + l] = cell[2 * (j - 1) + 1];
            }
            eta[l] = cell[2 * (steps - 1)];
        }
        auto ub = u.block(b);
        auto vb = v.block(b);
        std::fill(ub.begin(), ub.end(), 10.0);
        std::fill(vb.begin(), vb.end(), 10.0);
        simulate_block(theta, steps, {ub, vb}, xi, eta,
                       std::span<double>(y.data() + first_cell, v_lanes));
    }

    seek(padded * stride);
    y.resize(cells);
    return ObservationSet{std::move(y)};
}

std::array<double, kToggleSummaryDim> summary_quantiles(const ObservationSet& obs) {
    require(obs.y.size() >= kToggleSummaryDim, "insufficient-data",
            "need at least 19 observations for the quantile summary");
    std::vector<double> sorted(obs.y);
    std::sort(sorted.begin(), sorted.end());
    std::array<double, kToggleSummaryDim> q;
    for (std::size_t k = 0; k < kToggleSummaryDim; ++k) {
        q[k] = quantile_sorted(sorted, 0.05 * static_cast<double>(k + 1));
    }
    return q;
}

ModelHooks make_abc_model(std::size_t steps, std::size_t cells) {
    ModelHooks hooks;
    hooks.dim = kToggleDim;
    hooks.summary_dim = kToggleSummaryDim;
    hooks.sample_prior = [](RngStream& stream, std::span<double> out) {
        const ToggleParams theta = sample_prior(stream);
        const auto arr = theta.as_array();
        std::copy(arr.begin(), arr.end(), out.begin());
    };
    hooks.simulate = [steps, cells](std::span<const double> theta, RngStream& stream,
                                    std::size_t block_width, std::span<double> out) {
        const ObservationSet obs =
            simulate(ToggleParams::from_span(theta), steps, cells, stream, block_width);
        const auto q = summary_quantiles(obs);
        std::copy(q.begin(), q.end(), out.begin());
    };
    return hooks;
}

}  // namespace vexbayes::toggle
