#include "vexbayes/bege.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"

namespace vexbayes::bege {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::array<std::pair<double, double>, kBegeDim> kPriorBounds{{
    {1e-4, 0.5},   // p0
    {1e-4, 0.3},   // sigma_p
    {1e-4, 0.99},  // rho_p
    {1e-4, 0.5},   // phi_p_plus
    {1e-4, 0.5},   // phi_p_minus
    {1e-4, 1.0},   // n0
    {1e-4, 0.3},   // sigma_n
    {1e-4, 0.99},  // rho_n
    {-0.2, 0.1},   // phi_n_plus
    {1e-4, 0.75},  // phi_n_minus
    {-0.9, 0.9},   // mu
}};

inline double stationary_start(double intercept, double rho) {
    return rho < 1.0 ? intercept / (1.0 - rho) : intercept;
}

inline double shape_update(double intercept, double rho, double prev, double phi_plus,
                           double phi_minus, double sigma, double u) {
    const double phi = u >= 0.0 ? phi_plus : phi_minus;
    return intercept + rho * prev + phi / (2.0 * sigma * sigma) * u * u;
}

}  // namespace

BegeParams BegeParams::from_span(std::span<const double> v) {
    require(v.size() == kBegeDim, "invalid-argument", "BEGE parameter vector needs 11 entries");
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
}

std::span<const std::pair<double, double>> prior_bounds() { return kPriorBounds; }

BegeParams sample_prior(RngStream& stream) {
    std::array<double, kBegeDim> theta;
    for (std::size_t k = 0; k < kBegeDim; ++k) {
        theta[k] = stream.next_uniform(kPriorBounds[k].first, kPriorBounds[k].second);
    }
    return BegeParams::from_span(theta);
}

double log_prior(std::span<const double> theta) {
    require(theta.size() == kBegeDim, "invalid-argument", "BEGE parameter vector needs 11 entries");
    double lp = 0.0;
    for (std::size_t k = 0; k < kBegeDim; ++k) {
        const auto [lo, hi] = kPriorBounds[k];
        if (!(theta[k] >= lo && theta[k] < hi)) return kNegInf;
        lp -= std::log(hi - lo);
    }
    return lp;
}

double sample_gamma(RngStream& stream, double shape) {
    require(shape > 0.0, "invalid-argument", "gamma shape must be positive");
    if (shape < 1.0) {
        double u = stream.next_unit();
        if (u <= 0.0) u = 0x1.0p-53;
        return sample_gamma(stream, shape + 1.0) * fastmath::pow_pos(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = stream.next_gaussian();
        const double v1 = 1.0 + c * x;
        if (v1 <= 0.0) continue;
        const double v3 = v1 * v1 * v1;
        const double u = stream.next_unit();
        const double log_u = u > 0.0 ? fastmath::ln_pos(u) : kNegInf;
        if (log_u < 0.5 * x * x + d - d * v3 + d * fastmath::ln_pos(v3)) {
            return d * v3;
        }
    }
}

SimulateResult simulate(const BegeParams& theta, std::size_t months, RngStream& stream) {
    require(months >= 1, "invalid-argument", "need at least one month");
    require(theta.p0 > 0.0 && theta.n0 > 0.0, "invalid-argument",
            "shape intercepts must be positive");
    require(theta.sigma_p > 0.0 && theta.sigma_n > 0.0, "invalid-argument",
            "shock scales must be positive");

    SimulateResult result;
    result.returns.reserve(months);
    for (;;) {
        require(result.restarts <= 100, "degenerate-path",
                "shape process keeps collapsing below the floor");
        result.returns.clear();
        double p = stationary_start(theta.p0, theta.rho_p);
        double n = stationary_start(theta.n0, theta.rho_n);
        bool ok = true;
        for (std::size_t t = 0; t < months; ++t) {
            const double wp = sample_gamma(stream, p) - p;
            const double wn = sample_gamma(stream, n) - n;
            const double u = theta.sigma_p * wp - theta.sigma_n * wn;
            result.returns.push_back(u + theta.mu);
            p = shape_update(theta.p0, theta.rho_p, p, theta.phi_p_plus, theta.phi_p_minus,
                             theta.sigma_p, u);
            n = shape_update(theta.n0, theta.rho_n, n, theta.phi_n_plus, theta.phi_n_minus,
                             theta.sigma_n, u);
            if (p < kShapeFloor || n < kShapeFloor) {
                ok = false;
                ++result.restarts;
                break;
            }
        }
        if (ok) return result;
    }
}

double inc_gamma(double a, double x) {
    require(a > 0.0, "invalid-argument", "incomplete gamma needs a positive shape");
    require(x >= 0.0, "invalid-argument", "incomplete gamma needs a nonnegative argument");
    if (x == 0.0) return 0.0;
    double term = 1.0 / a;
    double sum = term;
    for (std::size_t j = 1; j <= 500; ++j) {
        term *= x / (a + static_cast<double>(j));
        sum += term;
        if (term < 1e-14 * sum) break;
    }
    const double pref = std::exp(a * std::log(x) - x - std::lgamma(a));
    return std::clamp(pref * sum, 0.0, 1.0);
}

void inc_gamma_block(double a, std::span<const double> x, std::span<double> out) {
    require(a > 0.0, "invalid-argument", "incomplete gamma needs a positive shape");
    require(out.size() == x.size(), "invalid-shape", "output length differs from input");
    const std::size_t lanes = x.size();
    if (lanes == 0) return;
    for (double v : x) {
        require(v >= 0.0, "invalid-argument", "incomplete gamma needs nonnegative arguments");
    }

    std::array<double, 16> term_buf, sum_buf;
    std::vector<double> term_dyn, sum_dyn;
    double* term = term_buf.data();
    double* sum = sum_buf.data();
    if (lanes > term_buf.size()) {
        term_dyn.assign(lanes, 0.0);
        sum_dyn.assign(lanes, 0.0);
        term = term_dyn.data();
        sum = sum_dyn.data();
    }
    for (std::size_t l = 0; l < lanes; ++l) {
        term[l] = 1.0 / a;
        sum[l] = term[l];
    }
    for (std::size_t j = 1; j <= 500; ++j) {
        const double denom = a + static_cast<double>(j);
#pragma omp simd
        for (std::size_t l = 0; l < lanes; ++l) {
            term[l] *= x[l] / denom;
            sum[l] += term[l];
        }
        double max_term = 0.0, max_sum = 0.0;
        for (std::size_t l = 0; l < lanes; ++l) {
            max_term = std::max(max_term, term[l]);
            max_sum = std::max(max_sum, sum[l]);
        }
        if (max_term < 1e-14 * max_sum) break;
    }
    const double lg = std::lgamma(a);
    for (std::size_t l = 0; l < lanes; ++l) {
        if (x[l] == 0.0) {
            out[l] = 0.0;
            continue;
        }
        const double pref = std::exp(a * std::log(x[l]) - x[l] - lg);
        out[l] = std::clamp(pref * sum[l], 0.0, 1.0);
    }
}

QuadratureGrid make_grid(double sigma_p, double p_prev, std::size_t nodes) {
    require(nodes >= 2, "invalid-grid", "quadrature grid needs at least two nodes");
    require(sigma_p > 0.0 && p_prev > 0.0, "invalid-grid", "grid parameters must be positive");
    QuadratureGrid grid;
    grid.nodes = nodes;
    grid.omega0 = 1e-4 - p_prev * sigma_p;
    const double upper = 10.0 * sigma_p * std::sqrt(p_prev);
    grid.delta = (upper - grid.omega0) / static_cast<double>(nodes - 1);
    require(grid.delta > 0.0, "invalid-grid", "quadrature spacing is not positive");
    return grid;
}

double bege_cdf(double u, double sigma_p, double sigma_n, double p_prev, double n_prev,
                const QuadratureGrid& grid, std::size_t block_width) {
    require(p_prev > 0.0 && n_prev > 0.0, "invalid-argument", "shapes must be positive");
    require(sigma_p > 0.0 && sigma_n > 0.0, "invalid-argument", "scales must be positive");
    require(grid.delta > 0.0 && grid.nodes >= 2, "invalid-grid", "invalid quadrature grid");
    require(block_width >= 1, "invalid-shape", "block width must be positive");

    const std::size_t m = grid.nodes;
    std::vector<double> arg_p(m + 1), arg_n(m), cdf_p(m + 1), surv_arg(m);
    for (std::size_t j = 0; j <= m; ++j) {
        const double omega = grid.omega0 + static_cast<double>(j) * grid.delta;
        arg_p[j] = std::max(0.0, (omega + p_prev * sigma_p) / sigma_p);
        if (j < m) {
            arg_n[j] = std::max(0.0, (omega - u + n_prev * sigma_n) / sigma_n);
        }
    }
    for (std::size_t j0 = 0; j0 <= m; j0 += block_width) {
        const std::size_t lanes = std::min(block_width, m + 1 - j0);
        inc_gamma_block(p_prev, std::span<const double>(arg_p.data() + j0, lanes),
                        std::span<double>(cdf_p.data() + j0, lanes));
    }
    for (std::size_t j0 = 0; j0 < m; j0 += block_width) {
        const std::size_t lanes = std::min(block_width, m - j0);
        inc_gamma_block(n_prev, std::span<const double>(arg_n.data() + j0, lanes),
                        std::span<double>(surv_arg.data() + j0, lanes));
    }

    double f = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        f += (1.0 - surv_arg[j - 1]) * (cdf_p[j] - cdf_p[j - 1]);
    }
    return std::clamp(f, 0.0, 1.0);
}

double log_likelihood(std::span<const double> theta_span, std::span<const double> returns,
                      std::size_t block_width, std::size_t nodes, std::size_t* floor_events) {
    require(returns.size() >= 2, "invalid-argument", "need a return series of length >= 2");
    BegeParams theta = BegeParams::from_span(theta_span);
    if (!(theta.sigma_p > 0.0 && theta.sigma_n > 0.0 && theta.p0 > 0.0 && theta.n0 > 0.0)) {
        return kNegInf;
    }

    double p = stationary_start(theta.p0, theta.rho_p);
    double n = stationary_start(theta.n0, theta.rho_n);
    if (p < kShapeFloor) p = kShapeFloor;
    if (n < kShapeFloor) n = kShapeFloor;

    double ll = 0.0;
    try {
        for (const double r : returns) {
            const double u = r - theta.mu;
            const QuadratureGrid grid = make_grid(theta.sigma_p, p, nodes);
            const double hi =
                bege_cdf(u + kFiniteDiffDelta, theta.sigma_p, theta.sigma_n, p, n, grid,
                         block_width);
            const double lo =
                bege_cdf(u - kFiniteDiffDelta, theta.sigma_p, theta.sigma_n, p, n, grid,
                         block_width);
            const double dens = std::max((hi - lo) / (2.0 * kFiniteDiffDelta), kDensityFloor);
            ll += std::log(dens);

            p = shape_update(theta.p0, theta.rho_p, p, theta.phi_p_plus, theta.phi_p_minus,
                             theta.sigma_p, u);
            n = shape_update(theta.n0, theta.rho_n, n, theta.phi_n_plus, theta.phi_n_minus,
                             theta.sigma_n, u);
            if (p < kShapeFloor) {
                p = kShapeFloor;
                if (floor_events) ++*floor_events;
            }
            if (n < kShapeFloor) {
                n = kShapeFloor;
                if (floor_events) ++*floor_events;
            }
        }
    } catch (const Error&) {
        return kNegInf;
    }
    return std::isfinite(ll) ? ll : kNegInf;
}

ModelHooks make_model(std::vector<double> returns, std::size_t block_width, std::size_t nodes) {
    auto shared = std::make_shared<const std::vector<double>>(std::move(returns));
    ModelHooks hooks;
    hooks.dim = kBegeDim;
    hooks.sample_prior = [](RngStream& stream, std::span<double> out) {
        const auto theta = bege::sample_prior(stream).as_array();
        std::copy(theta.begin(), theta.end(), out.begin());
    };
    hooks.log_prior = [](std::span<const double> theta) { return bege::log_prior(theta); };
    hooks.log_likelihood = [shared, block_width, nodes](std::span<const double> theta) {
        return log_likelihood(theta, *shared, block_width, nodes);
    };
    hooks.block_log_likelihood = [shared, block_width, nodes](std::span<const double> params,
                                                              std::size_t lanes,
                                                              std::span<double> out) {
        for (std::size_t l = 0; l < lanes; ++l) {
            out[l] = log_likelihood(params.subspan(l * kBegeDim, kBegeDim), *shared, block_width,
                                    nodes);
        }
    };
    return hooks;
}

smc::SmcResult run_inference(std::span<const double> returns, const InferenceConfig& config) {
    smc::SmcConfig smc_config;
    smc_config.particles = config.particles;
    smc_config.block_width = config.block_width;
    smc_config.workers = config.workers;
    smc_config.esjd = true;
    smc_config.seed = config.seed;
    smc_config.trace = config.trace;
    return smc::run_smc(
        make_model(std::vector<double>(returns.begin(), returns.end()), config.block_width,
                   config.nodes),
        smc_config);
}

std::vector<double> read_returns_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "io-error", "empty returns file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "log_return", "io-error", "returns file must start with header log_return");
    std::vector<double> returns;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(line, &used);
        require(used == line.size(), "io-error", "malformed return value: " + line);
        returns.push_back(v);
    }
    return returns;
}

std::vector<double> read_returns_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "io-error", "cannot open " + path);
    return read_returns_csv(in);
}

void write_returns_csv(std::span<const double> returns, std::ostream& out) {
    out << "log_return\n";
    char buf[64];
    for (double r : returns) {
        std::snprintf(buf, sizeof(buf), "%.17g", r);
        out << buf << '\n';
    }
}

void write_returns_csv(std::span<const double> returns, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "io-error", "cannot open " + path + " for writing");
    write_returns_csv(returns, out);
    require(out.good(), "io-error", "write to " + path + " failed");
}

void write_posterior_csv(const smc::ParticleEnsemble& ensemble, std::ostream& out) {
    out << "p0,sigma_p,rho_p,phi_p_plus,phi_p_minus,n0,sigma_n,rho_n,phi_n_plus,phi_n_minus,mu,"
           "weight\n";
    char buf[64];
    const auto cell = [&](double v, bool lead_comma) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        if (lead_comma) out << ',';
        out << buf;
    };
    std::vector<double> w(ensemble.count);
    double total = 0.0;
    for (std::size_t i = 0; i < ensemble.count; ++i) {
        w[i] = std::exp(ensemble.log_weights[i]);
        total += w[i];
    }
    for (std::size_t i = 0; i < ensemble.count; ++i) {
        for (std::size_t k = 0; k < ensemble.dim; ++k) {
            cell(ensemble.particles[i * ensemble.dim + k], k > 0);
        }
        cell(w[i] / total, true);
        out << '\n';
    }
}

void write_posterior_csv(const smc::ParticleEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "io-error", "cannot open " + path + " for writing");
    write_posterior_csv(ensemble, out);
    require(out.good(), "io-error", "write to " + path + " failed");
}

}  // namespace vexbayes::bege
