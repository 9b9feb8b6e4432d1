#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vexbayes/model.hpp"
#include "vexbayes/rng.hpp"
#include "vexbayes/smc.hpp"

namespace vexbayes::bege {

inline constexpr std::size_t kBegeDim = 11;
inline constexpr double kShapeFloor = 1e-6;
inline constexpr double kDensityFloor = 1e-300;
inline constexpr double kFiniteDiffDelta = 1e-4;

/// theta = (p0, sigma_p, rho_p, phi_p_plus, phi_p_minus,
///          n0, sigma_n, rho_n, phi_n_plus, phi_n_minus, mu)
struct BegeParams {
    double p0, sigma_p, rho_p, phi_p_plus, phi_p_minus;
    double n0, sigma_n, rho_n, phi_n_plus, phi_n_minus;
    double mu;

    std::array<double, kBegeDim> as_array() const {
        return {p0, sigma_p, rho_p, phi_p_plus, phi_p_minus,
                n0, sigma_n, rho_n, phi_n_plus, phi_n_minus, mu};
    }
    static BegeParams from_span(std::span<const double> v);
};

/// Independent uniform prior bounds, in parameter order.
std::span<const std::pair<double, double>> prior_bounds();

BegeParams sample_prior(RngStream& stream);
double log_prior(std::span<const double> theta);

/// Standard gamma draw, unit scale (Marsaglia-Tsang).
double sample_gamma(RngStream& stream, double shape);

struct SimulateResult {
    std::vector<double> returns;
    std::size_t restarts = 0;  // paths restarted after shape underflow
};

/// Forward simulation: centered-gamma shocks, shape recursion with the
/// indicator split on the innovation sign, stationary initialization
/// p_1 = p0/(1 - rho_p) (analogously for n). A path whose shape falls below
/// the floor is restarted with fresh variates; more than 100 restarts raise
/// degenerate-path.
SimulateResult simulate(const BegeParams& theta, std::size_t months, RngStream& stream);

/// Regularized lower incomplete gamma P(a, x) via the power series,
/// truncated at 1e-14 relative or 500 terms. Requires a > 0, x >= 0.
double inc_gamma(double a, double x);

/// Lane-wise series: all lanes iterate together with terms reused across
/// iterations; truncation is judged jointly under the infinity norm.
void inc_gamma_block(double a, std::span<const double> x, std::span<double> out);

/// omega-grid for the distribution-function quadrature:
/// omega0 = 1e-4 - p_prev*sigma_p, delta = (10*sigma_p*sqrt(p_prev) - omega0)/(nodes - 1).
struct QuadratureGrid {
    std::size_t nodes = 100;  // N_omega; the grid holds nodes+1 points
    double omega0 = 0.0;
    double delta = 0.0;
};

/// Errors with invalid-grid when the spacing is not positive.
QuadratureGrid make_grid(double sigma_p, double p_prev, std::size_t nodes = 100);

/// Riemann-sum distribution function of the innovation u given the previous
/// shapes; incomplete-gamma arguments clamped at zero, result clamped to
/// [0, 1]. The P evaluations over the grid run in blocks of block_width.
double bege_cdf(double u, double sigma_p, double sigma_n, double p_prev, double n_prev,
                const QuadratureGrid& grid, std::size_t block_width = 4);

/// Log-likelihood of the return series: shape recursion along the observed
/// innovations (floored at kShapeFloor), transitional densities by central
/// finite differences of the distribution function, densities floored at
/// kDensityFloor. Non-finite results collapse to -inf (a rejected proposal).
/// floor_events, when given, counts shape floorings.
double log_likelihood(std::span<const double> theta, std::span<const double> returns,
                      std::size_t block_width = 4, std::size_t nodes = 100,
                      std::size_t* floor_events = nullptr);

/// SMC hooks over a fixed return series; node-level blocking uses
/// block_width lanes.
ModelHooks make_model(std::vector<double> returns, std::size_t block_width = 4,
                      std::size_t nodes = 100);

struct InferenceConfig {
    std::size_t particles = 1024;
    std::size_t workers = 1;
    std::size_t block_width = 4;
    std::size_t nodes = 100;
    std::uint64_t seed = 0;
    std::ostream* trace = nullptr;
};

/// Adaptive SMC with ESJD proposal-scale selection.
smc::SmcResult run_inference(std::span<const double> returns, const InferenceConfig& config);

/// Single-column CSV with header log_return.
std::vector<double> read_returns_csv(std::istream& in);
std::vector<double> read_returns_csv(const std::string& path);
void write_returns_csv(std::span<const double> returns, std::ostream& out);
void write_returns_csv(std::span<const double> returns, const std::string& path);

/// One row per particle: the 11 parameters plus the normalized weight.
void write_posterior_csv(const smc::ParticleEnsemble& ensemble, std::ostream& out);
void write_posterior_csv(const smc::ParticleEnsemble& ensemble, const std::string& path);

}  // namespace vexbayes::bege
