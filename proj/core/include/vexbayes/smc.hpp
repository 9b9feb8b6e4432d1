#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vexbayes/model.hpp"
#include "vexbayes/rng.hpp"

namespace vexbayes::smc {

/// Likelihood-annealed SMC state. Weights are kept in log space; log_liks
/// and log_priors cache the model evaluations for the current particles.
struct ParticleEnsemble {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<double> particles;    // count x dim
    std::vector<double> log_weights;  // count
    std::vector<double> log_liks;     // count
    std::vector<double> log_priors;   // count
    double temperature = 0.0;
    double log_evidence = 0.0;
    std::size_t iteration = 0;

    std::span<double> row(std::size_t i) { return {particles.data() + i * dim, dim}; }
    std::span<const double> row(std::size_t i) const {
        return {particles.data() + i * dim, dim};
    }
};

/// Effective sample size of log weights: [sum w~^2]^-1 on the normalized
/// weights. Errors with degenerate-ensemble when all weights are -inf.
double ess(std::span<const double> log_weights);

/// Bisection for the next temperature: the t in (t_n, 1] at which the
/// reweighted ESS equals count/2, or 1 when the ESS at t=1 stays above that.
/// Requires temperature < 1.
double find_temperature(const ParticleEnsemble& ensemble, double tolerance = 1e-10);

/// log_weights += (t_next - t_n) * log_liks; the evidence accumulator gains
/// logsumexp(new) - logsumexp(old); temperature advances to t_next.
void reweight_and_update_evidence(ParticleEnsemble& ensemble, double t_next);

/// Multinomial resampling by inverse-CDF binary search over the cumulative
/// normalized weights; weights reset to 1/count, cached rows permuted
/// consistently.
void resample_multinomial(ParticleEnsemble& ensemble, RngStream& stream);

/// Random-walk proposal: theta* = theta + h * L z with L the (jittered)
/// Cholesky factor of the particle sample covariance.
struct ProposalKernel {
    std::size_t dim = 0;
    std::vector<double> covariance;  // dim x dim
    std::vector<double> cholesky;    // dim x dim, lower triangle
    double scale = 1.0;              // h
    std::size_t steps = 1;           // R_n
    double acceptance_estimate = 0.0;
};

/// R_n = ceil(ln c / ln(1 - p_acc)) with p_acc clamped to [0.01, 0.99],
/// capped at step_cap. Requires 0 < c < 1.
std::size_t steps_from_acceptance(double p_acc, double c, std::size_t step_cap = 100);

/// Sample covariance of the particle cloud with Cholesky factorization;
/// diagonal jitter is added when the plain factorization fails, and
/// degenerate-ensemble is raised when even the jittered matrix is not
/// positive definite.
ProposalKernel make_kernel(const ParticleEnsemble& ensemble, double scale,
                           double jitter = 1e-10);

struct MoveStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    double acceptance_rate() const {
        return proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    }
};

/// `steps` tempered random-walk steps on every particle, processed in blocks
/// of block_width lanes. All Gaussian increments and acceptance uniforms for
/// a block are pre-drawn before the block loop; variates are addressed by a
/// per-particle canonical layout, so accept/reject decisions are identical
/// for every block width. lane_scales optionally overrides the kernel scale
/// per particle (size count); jump_sq, when given, accumulates the squared
/// Mahalanobis displacement of accepted moves per particle.
MoveStats mcmc_block_move(ParticleEnsemble& ensemble, const ProposalKernel& kernel,
                          const ModelHooks& model, double t_n, std::size_t block_width,
                          RngStream& stream, std::size_t steps = 0,
                          std::span<const double> lane_scales = {},
                          std::vector<double>* jump_sq = nullptr);

struct EsjdResult {
    double h_opt = 0.0;
    std::size_t sweeps = 0;          // move sweeps after the trial
    double trial_acceptance = 0.0;
    double trial_median = 0.0;       // median trial jump over all particles
};

/// Expected-squared-jump-distance scale selection: particles take one trial
/// step with grid scales assigned cyclically; h_opt maximizes the per-scale
/// median of (jump distance x acceptance); moves with h_opt then repeat until
/// at least half the particles have cumulative jump distance above the trial
/// median, capped at sweep_cap sweeps. Falls back to 2.38/sqrt(d) when every
/// trial jump is zero.
EsjdResult esjd_select_scale(ParticleEnsemble& ensemble, const ModelHooks& model, double t_n,
                             std::span<const double> scales, std::size_t block_width,
                             RngStream& stream, double jitter = 1e-10,
                             std::size_t sweep_cap = 100);

struct SmcConfig {
    std::size_t particles = 2000;
    std::size_t block_width = 4;
    std::size_t workers = 1;
    double c = 0.01;          // MCMC step tuning constant
    double scale = 0.0;       // proposal scale h; <= 0 selects 2.38/sqrt(d)
    bool esjd = false;        // ESJD scale adaptation instead of fixed h
    std::vector<double> esjd_scales = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double bisection_tol = 1e-10;
    double jitter = 1e-10;
    std::size_t max_iterations = 1000;
    std::size_t step_cap = 100;
    std::uint64_t seed = 0;
    std::ostream* trace = nullptr;  // per-iteration CSV: n,t_n,ess,log_evidence,R_n,p_acc,h
};

struct SmcResult {
    ParticleEnsemble ensemble;
    double log_evidence = 0.0;
    std::size_t iterations = 0;
};

/// Full adaptive sampler: repeat find_temperature, reweight, resample, tune,
/// move until t = 1. Likelihood evaluation and moves run fork-join over
/// `workers` disjoint particle-block ranges with per-worker streams keyed by
/// (iteration, worker, role); resampling and the temperature search run on
/// the coordinator. Requires particles >= 2*block_width.
SmcResult run_smc(const ModelHooks& model, const SmcConfig& config);

}  // namespace vexbayes::smc
