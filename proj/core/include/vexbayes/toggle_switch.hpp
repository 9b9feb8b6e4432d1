#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "vexbayes/model.hpp"
#include "vexbayes/rng.hpp"

namespace vexbayes::toggle {

/// theta = (mu, sigma, gamma, alpha_u, alpha_v, beta_u, beta_v)
struct ToggleParams {
    double mu;
    double sigma;
    double gamma;
    double alpha_u;
    double alpha_v;
    double beta_u;
    double beta_v;

    std::array<double, 7> as_array() const {
        return {mu, sigma, gamma, alpha_u, alpha_v, beta_u, beta_v};
    }
    static ToggleParams from_span(std::span<const double> v);
};

/// Per-lane gene expression state; u and v hold one lane per cell and stay
/// >= 1 after every step (reflecting floor).
struct CellStateBlock {
    std::span<double> u;
    std::span<double> v;
};

/// Noisy terminal measurements, one per cell; every y >= 1.
struct ObservationSet {
    std::vector<double> y;
};

inline constexpr std::size_t kToggleDim = 7;
inline constexpr std::size_t kToggleSummaryDim = 19;

/// Maps 7 unit uniforms onto the prior box
/// mu~U(250,400), sigma~U(0.05,0.5), gamma~U(0.05,0.35),
/// alpha_u,alpha_v~U(0,50), beta_u,beta_v~U(0,7), in exactly this order.
ToggleParams params_from_unit(std::span<const double> unit);

/// Draws theta from the prior (7 uniforms in the order above).
ToggleParams sample_prior(RngStream& stream);

/// Number of stream positions a single cell consumes: (u,v) increments for
/// T-1 steps, the observation normal, and one discarded pad position. The
/// canonical variate layout assigns cell c the positions
/// [base + c*cell_stride(T), base + (c+1)*cell_stride(T)) of the call's
/// stream, independent of any kernel block width.
inline constexpr std::size_t cell_stride(std::size_t steps) { return 2 * steps; }

/// Evolves one block of cells from (u,v)=(10,10) for T-1 Euler steps with
/// pre-drawn standard normals and writes the V noisy observations.
/// xi is step-major: step j (j=1..T-1) occupies xi[(j-1)*2V .. j*2V) with the
/// V u-increments first, then the V v-increments; eta holds the V observation
/// normals. Requires T >= 2 (invalid-horizon).
void simulate_block(const ToggleParams& theta, std::size_t steps, CellStateBlock block,
                    std::span<const double> xi, std::span<const double> eta,
                    std::span<double> y_out);

/// Simulates C cells in blocks of V. All of a block's normals are drawn in
/// one Gaussian fill before the block loop; variates are addressed by the
/// canonical per-cell layout, so results are bit-identical for every
/// supported V. The stream counter is aligned to a pair boundary on entry and
/// ends past the padded cell range.
ObservationSet simulate(const ToggleParams& theta, std::size_t steps, std::size_t cells,
                        RngStream& stream, std::size_t block_width);

/// 19 equally spaced quantiles (levels 0.05..0.95) of the empirical
/// distribution of y, linear-interpolation estimator. Requires C >= 19
/// (insufficient-data).
std::array<double, kToggleSummaryDim> summary_quantiles(const ObservationSet& obs);

/// ABC hooks: prior sampling plus simulation reduced to the 19 quantiles.
ModelHooks make_abc_model(std::size_t steps, std::size_t cells);

}  // namespace vexbayes::toggle
