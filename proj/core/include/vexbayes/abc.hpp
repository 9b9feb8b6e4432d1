#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vexbayes/model.hpp"

namespace vexbayes::abc {

/// Fixed-N prior predictive sample: parameter rows, summary rows, and
/// discrepancies against the observed summaries. Rows correspond index-wise;
/// failed rows carry a flag instead of aborting the batch.
struct PriorPredictiveSet {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::size_t summary_dim = 0;
    std::vector<double> params;         // rows x dim
    std::vector<double> summaries;      // rows x summary_dim
    std::vector<double> discrepancies;  // rows (NaN where failed)
    std::vector<std::uint8_t> failed;   // rows

    std::span<const double> param_row(std::size_t r) const {
        return {params.data() + r * dim, dim};
    }
    std::span<const double> summary_row(std::size_t r) const {
        return {summaries.data() + r * summary_dim, summary_dim};
    }
};

/// Unweighted Euclidean distance between summary vectors of equal length
/// (invalid-summary otherwise).
double discrepancy(std::span<const double> sim, std::span<const double> obs);

/// Draws N prior predictive samples with P workers; worker w owns stream
/// (seed, stream_id=w) and fills its contiguous partition range. Results are
/// deterministic for fixed (seed, P); per-row model failures set the failure
/// flag. observed drives the discrepancy column.
PriorPredictiveSet run_prior_predictive(const ModelHooks& model, std::size_t n,
                                        std::size_t workers, std::size_t block_width,
                                        std::uint64_t seed, std::span<const double> observed);

struct EpsilonSelection {
    double epsilon = 0.0;
    std::vector<std::size_t> accepted;  // ascending row indices with rho <= epsilon
};

/// epsilon = accept_fraction-quantile of the non-failed discrepancies
/// (raised to the next order statistic when interpolation would accept fewer
/// than ceil(q*N) rows). Errors with empty-set when every row failed.
EpsilonSelection select_epsilon(const PriorPredictiveSet& set, double accept_fraction);

/// CSV: header row,theta_1..theta_d,s_1..s_k,rho,failed; 17 significant
/// digits.
void write_csv(const PriorPredictiveSet& set, std::ostream& out);
void write_csv(const PriorPredictiveSet& set, const std::string& path);

}  // namespace vexbayes::abc
