#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vexbayes {

/// log(sum(exp(x))) with max subtraction; returns -inf for an empty or
/// all -inf input.
double logsumexp(std::span<const double> x);

/// Linear-interpolation order-statistic quantile (the common type-7
/// definition) of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double level);

/// Same estimator on an unsorted sample (copies and sorts).
double quantile(std::span<const double> sample, double level);

double mean(std::span<const double> x);
double sample_variance(std::span<const double> x);
double median(std::span<const double> sample);

/// Weighted-free sample covariance (divisor n-1) of row-major data
/// (rows x dim); returns a dim x dim row-major matrix.
std::vector<double> sample_covariance(std::span<const double> data, std::size_t rows,
                                      std::size_t dim);

/// In-place lower Cholesky factorization of a row-major symmetric matrix.
/// Returns false if a pivot is not strictly positive. On success the lower
/// triangle holds L (upper triangle zeroed).
bool cholesky(std::span<double> a, std::size_t dim);

/// log C(n, k) via lgamma.
double log_binomial(unsigned n, unsigned k);

}  // namespace vexbayes
