#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vexbayes/model.hpp"
#include "vexbayes/rng.hpp"

namespace vexbayes::weakinfo {

/// Prior standard deviations of the bivariate Gaussian prior on
/// (beta0, beta1); the base prior is lambda0 = (10, 2.5).
struct Hyperparam {
    double lambda1;
    double lambda2;
};

inline constexpr Hyperparam kBasePrior{10.0, 2.5};

/// Acute-toxicity data: dose levels, group sizes and death counts
/// (0 <= deaths <= group size).
struct BioassayData {
    std::vector<double> dose;
    std::vector<unsigned> group_size;
    std::vector<unsigned> deaths;

    std::size_t groups() const { return dose.size(); }
};

/// The four-group design used throughout: n = (5,5,5,5),
/// x = (-0.86, -0.3, -0.05, -0.75).
BioassayData default_design();

/// Product-binomial log-likelihood with p_i = 1/(1 + exp(b0 + b1*x_i)).
double bioassay_log_likelihood(double beta0, double beta1, const BioassayData& data);

/// Lane-wise form over `lanes` (beta0, beta1) pairs stored row-major.
void bioassay_block_log_likelihood(std::span<const double> params, std::size_t lanes,
                                   const BioassayData& data, std::span<double> out);

struct PriorPredictiveDraw {
    std::array<double, 2> theta;
    BioassayData data;
};

/// theta ~ N(0, diag(lambda)^2) (beta0 first), then per-group binomial
/// deaths via group_size Bernoulli draws each.
PriorPredictiveDraw sample_prior_predictive(const Hyperparam& lambda, const BioassayData& design,
                                            RngStream& stream);

/// p_k^i = (1/N) #{ j : evidences_k[j] <= evidences_base[i] }, log evidences
/// compared directly.
std::vector<double> estimate_pvalues(std::span<const double> evidences_base,
                                     std::span<const double> evidences_k);

/// alpha-quantile of the p-value sample (linear-interpolation estimator).
double compute_cutoff(std::span<const double> pvalues, double alpha);

/// SMC hooks for one dataset under one prior.
ModelHooks make_bioassay_model(const BioassayData& data, const Hyperparam& prior);

struct WeakInfoConfig {
    std::size_t hyper_count = 400;  // K
    std::size_t datasets = 400;     // N per prior
    std::size_t particles = 500;    // N_p
    double alpha = 0.05;
    double c = 0.01;
    double scale = 1.6828427124746189;  // h = 2.38/sqrt(2)
    std::size_t workers = 1;            // task parallelism across hyperparameters
    std::size_t block_width = 4;
    std::uint64_t seed = 0;
    bool redraw_base = false;  // redraw the base datasets per hyperparameter
    Hyperparam base = kBasePrior;
    BioassayData design;  // empty -> default_design()
};

struct CutoffRow {
    std::size_t index;  // 0 is the base prior
    Hyperparam lambda;
    double gamma;
    bool weakly_informative;
    std::size_t completed;  // evidence pairs that converged
};

struct CutoffTable {
    double alpha = 0.0;
    std::vector<CutoffRow> rows;
};

/// Full test: K hyperparameters ~ U([0.1,10] x [0.1,20]), N datasets per
/// prior, evidence of each dataset under the row's prior via the adaptive
/// SMC sampler, p-values, alpha-cutoffs, and the weak-informativity flag
/// gamma_k > gamma_0. Hyperparameters are distributed across workers; each
/// SMC run is single-threaded with block_width lanes.
CutoffTable run_weak_info_test(const WeakInfoConfig& config);

/// CSV: k,lambda1,lambda2,gamma_alpha,weakly_informative
void write_csv(const CutoffTable& table, std::ostream& out);

}  // namespace vexbayes::weakinfo
