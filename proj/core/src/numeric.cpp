#include "vexbayes/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vexbayes/errors.hpp"

namespace vexbayes {

double logsumexp(std::span<const double> x) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;  // empty, all -inf, or contains +inf/nan
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

double quantile_sorted(std::span<const double> sorted, double level) {
    require(!sorted.empty(), "insufficient-data", "quantile of an empty sample");
    require(level >= 0.0 && level <= 1.0, "invalid-argument", "quantile level outside [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * level;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> sample, double level) {
    std::vector<double> copy(sample.begin(), sample.end());
    std::sort(copy.begin(), copy.end());
    return quantile_sorted(copy, level);
}

double mean(std::span<const double> x) {
    require(!x.empty(), "insufficient-data", "mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    require(x.size() >= 2, "insufficient-data", "variance needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double median(std::span<const double> sample) { return quantile(sample, 0.5); }

std::vector<double> sample_covariance(std::span<const double> data, std::size_t rows,
                                      std::size_t dim) {
    require(rows >= 2, "insufficient-data", "covariance needs at least two rows");
    std::vector<double> mu(dim, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < dim; ++k) mu[k] += data[r * dim + k];
    for (double& v : mu) v /= static_cast<double>(rows);

    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double di = data[r * dim + i] - mu[i];
            for (std::size_t j = 0; j <= i; ++j) {
                cov[i * dim + j] += di * (data[r * dim + j] - mu[j]);
            }
        }
    }
    const double norm = 1.0 / static_cast<double>(rows - 1);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            cov[i * dim + j] *= norm;
            cov[j * dim + i] = cov[i * dim + j];
        }
    return cov;
}

bool cholesky(std::span<double> a, std::size_t dim) {
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j * dim + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * dim + k] * a[j * dim + k];
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        a[j * dim + j] = ljj;
        for (std::size_t i = j + 1; i < dim; ++i) {
            double s = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
            a[i * dim + j] = s / ljj;
        }
        for (std::size_t i = 0; i < j; ++i) a[i * dim + j] = 0.0;
    }
    return true;
}

double log_binomial(unsigned n, unsigned k) {
    require(k <= n, "invalid-argument", "binomial coefficient needs k <= n");
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace vexbayes
