#include "vexbayes/weak_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"
#include "vexbayes/numeric.hpp"
#include "vexbayes/smc.hpp"

namespace vexbayes::weakinfo {

namespace {

// log(1 + e^b), stable for any b
inline double log1p_exp(double b) {
    const double m = b > 0.0 ? b : 0.0;
    const double ab = b > 0.0 ? b : -b;
    return m + fastmath::ln_pos(1.0 + fastmath::exp2_clamped(-ab * fastmath::kInvLn2));
}

inline double ll_lane(double beta0, double beta1, const BioassayData& data,
                      std::span<const double> log_choose) {
    double ll = 0.0;
    for (std::size_t g = 0; g < data.groups(); ++g) {
        const double b = beta0 + beta1 * data.dose[g];
        const double lse = log1p_exp(b);  // -log p_i
        const double y = data.deaths[g];
        const double miss = data.group_size[g] - data.deaths[g];
        ll += log_choose[g];
        if (y > 0.0) ll -= y * lse;
        if (miss > 0.0) ll += miss * (b - lse);
    }
    return ll;
}

std::vector<double> log_choose_table(const BioassayData& data) {
    std::vector<double> table(data.groups());
    for (std::size_t g = 0; g < data.groups(); ++g) {
        table[g] = log_binomial(data.group_size[g], data.deaths[g]);
    }
    return table;
}

void validate(const BioassayData& data, bool with_deaths) {
    require(data.dose.size() == data.group_size.size(), "invalid-argument",
            "dose and group size lengths differ");
    if (with_deaths) {
        require(data.deaths.size() == data.dose.size(), "invalid-argument",
                "death count length differs from the design");
        for (std::size_t g = 0; g < data.groups(); ++g) {
            require(data.deaths[g] <= data.group_size[g], "invalid-argument",
                    "more deaths than animals in a group");
        }
    }
}

}  // namespace

BioassayData default_design() {
    return {{-0.86, -0.3, -0.05, -0.75}, {5, 5, 5, 5}, {}};
}

double bioassay_log_likelihood(double beta0, double beta1, const BioassayData& data) {
    validate(data, true);
    return ll_lane(beta0, beta1, data, log_choose_table(data));
}

void bioassay_block_log_likelihood(std::span<const double> params, std::size_t lanes,
                                   const BioassayData& data, std::span<double> out) {
    validate(data, true);
    const auto table = log_choose_table(data);
    for (std::size_t l = 0; l < lanes; ++l) {
        out[l] = ll_lane(params[2 * l], params[2 * l + 1], data, table);
    }
}

PriorPredictiveDraw sample_prior_predictive(const Hyperparam& lambda, const BioassayData& design,
                                            RngStream& stream) {
    validate(design, false);
    require(lambda.lambda1 >= 0.0 && lambda.lambda2 >= 0.0, "invalid-argument",
            "prior scales must be nonnegative");

    PriorPredictiveDraw draw;
    stream.align_even();
    std::array<double, 2> z;
    stream.fill_gaussian(z, 0.0, 1.0);
    draw.theta = {lambda.lambda1 * z[0], lambda.lambda2 * z[1]};

    draw.data = design;
    draw.data.deaths.assign(design.groups(), 0);
    for (std::size_t g = 0; g < design.groups(); ++g) {
        const double b = draw.theta[0] + draw.theta[1] * design.dose[g];
        const double p = fastmath::exp2_clamped(-log1p_exp(b) * fastmath::kInvLn2);
        unsigned deaths = 0;
        for (unsigned j = 0; j < design.group_size[g]; ++j) {
            if (stream.next_unit() < p) ++deaths;
        }
        draw.data.deaths[g] = deaths;
    }
    return draw;
}

std::vector<double> estimate_pvalues(std::span<const double> evidences_base,
                                     std::span<const double> evidences_k) {
    require(!evidences_k.empty(), "invalid-argument", "need at least one comparison evidence");
    std::vector<double> sorted(evidences_k.begin(), evidences_k.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> pvalues(evidences_base.size());
    for (std::size_t i = 0; i < evidences_base.size(); ++i) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), evidences_base[i]);
        pvalues[i] = static_cast<double>(it - sorted.begin()) / n;
    }
    return pvalues;
}

double compute_cutoff(std::span<const double> pvalues, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "invalid-argument", "alpha must lie in (0, 1)");
    return quantile(pvalues, alpha);
}

ModelHooks make_bioassay_model(const BioassayData& data, const Hyperparam& prior) {
    validate(data, true);
    require(prior.lambda1 > 0.0 && prior.lambda2 > 0.0, "invalid-argument",
            "prior scales must be positive");

    ModelHooks hooks;
    hooks.dim = 2;
    const double l1 = prior.lambda1;
    const double l2 = prior.lambda2;
    const double norm = -std::log(2.0 * 3.141592653589793238462643 * l1 * l2);
    hooks.sample_prior = [l1, l2](RngStream& stream, std::span<double> out) {
        stream.align_even();
        std::array<double, 2> z;
        stream.fill_gaussian(z, 0.0, 1.0);
        out[0] = l1 * z[0];
        out[1] = l2 * z[1];
    };
    hooks.log_prior = [l1, l2, norm](std::span<const double> theta) {
        const double a = theta[0] / l1;
        const double b = theta[1] / l2;
        return norm - 0.5 * (a * a + b * b);
    };
    auto shared = std::make_shared<const BioassayData>(data);
    auto table = std::make_shared<const std::vector<double>>(log_choose_table(data));
    hooks.log_likelihood = [shared, table](std::span<const double> theta) {
        return ll_lane(theta[0], theta[1], *shared, *table);
    };
    hooks.block_log_likelihood = [shared, table](std::span<const double> params,
                                                 std::size_t lanes, std::span<double> out) {
        for (std::size_t l = 0; l < lanes; ++l) {
            out[l] = ll_lane(params[2 * l], params[2 * l + 1], *shared, *table);
        }
    };
    return hooks;
}

CutoffTable run_weak_info_test(const WeakInfoConfig& config) {
    require(config.datasets >= 1, "invalid-argument", "need at least one dataset per prior");
    require(config.workers >= 1, "invalid-argument", "need at least one worker");
    const BioassayData design = config.design.dose.empty() ? default_design() : config.design;
    validate(design, false);

    const std::size_t k_total = config.hyper_count + 1;  // base prior is row 0
    const std::size_t n = config.datasets;

    // hyperparameter grid: lambda_k ~ U([0.1,10] x [0.1,20])
    std::vector<Hyperparam> lambdas(k_total);
    lambdas[0] = config.base;
    {
        RngStream stream(derive_seed(config.seed, {1}), 0);
        for (std::size_t k = 1; k < k_total; ++k) {
            const double a = stream.next_uniform(0.1, 10.0);
            const double b = stream.next_uniform(0.1, 20.0);
            lambdas[k] = {a, b};
        }
    }

    // base-prior datasets, drawn once and shared across hyperparameters
    // unless redraw_base asks for the literal per-k redraw
    std::vector<BioassayData> shared_base(n);
    if (!config.redraw_base) {
        for (std::size_t i = 0; i < n; ++i) {
            RngStream stream(derive_seed(config.seed, {2, i}), 0);
            shared_base[i] = sample_prior_predictive(config.base, design, stream).data;
        }
    }

    CutoffTable table;
    table.alpha = config.alpha;
    table.rows.resize(k_total);

    const auto evidence_of = [&](const BioassayData& data, const Hyperparam& prior,
                                 std::uint64_t seed, double& out) {
        smc::SmcConfig smc_config;
        smc_config.particles = config.particles;
        smc_config.block_width = config.block_width;
        smc_config.workers = 1;
        smc_config.c = config.c;
        smc_config.scale = config.scale;
        smc_config.seed = seed;
        try {
            out = smc::run_smc(make_bioassay_model(data, prior), smc_config).log_evidence;
            return true;
        } catch (const Error&) {
            out = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
    };

    const auto row_task = [&](std::size_t k) {
        const Hyperparam& lambda = lambdas[k];
        std::vector<double> base_evidence;
        std::vector<double> hyper_evidence;
        base_evidence.reserve(n);
        hyper_evidence.reserve(n);
        std::size_t completed = 0;

        for (std::size_t i = 0; i < n; ++i) {
            BioassayData base_data;
            if (config.redraw_base) {
                RngStream stream(derive_seed(config.seed, {5, k, i}), 0);
                base_data = sample_prior_predictive(config.base, design, stream).data;
            } else {
                base_data = shared_base[i];
            }
            RngStream stream(derive_seed(config.seed, {3, k, i}), 0);
            const BioassayData hyper_data =
                sample_prior_predictive(lambda, design, stream).data;

            double ev_base = 0.0, ev_hyper = 0.0;
            const bool ok_base =
                evidence_of(base_data, lambda, derive_seed(config.seed, {4, k, 0, i}), ev_base);
            const bool ok_hyper =
                evidence_of(hyper_data, lambda, derive_seed(config.seed, {4, k, 1, i}), ev_hyper);
            if (ok_base) base_evidence.push_back(ev_base);
            if (ok_hyper) hyper_evidence.push_back(ev_hyper);
            if (ok_base && ok_hyper) ++completed;
        }

        CutoffRow& row = table.rows[k];
        row.index = k;
        row.lambda = lambda;
        row.completed = completed;
        if (base_evidence.empty() || hyper_evidence.empty()) {
            row.gamma = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        const std::vector<double> pvalues = estimate_pvalues(base_evidence, hyper_evidence);
        row.gamma = compute_cutoff(pvalues, config.alpha);
    };

    const WorkPartition tasks = partition(k_total, std::min(config.workers, k_total), 1);
    if (tasks.workers == 1) {
        for (std::size_t k = 0; k < k_total; ++k) row_task(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(tasks.workers);
        for (const auto& [begin, end] : tasks.ranges) {
            pool.emplace_back([&, begin = begin, end = end] {
                for (std::size_t k = begin; k < end; ++k) row_task(k);
            });
        }
        for (auto& t : pool) t.join();
    }

    const double gamma0 = table.rows[0].gamma;
    for (CutoffRow& row : table.rows) {
        row.weakly_informative = row.index != 0 && row.gamma > gamma0;
    }
    return table;
}

void write_csv(const CutoffTable& table, std::ostream& out) {
    out << "k,lambda1,lambda2,gamma_alpha,weakly_informative\n";
    char buf[64];
    const auto cell = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (const CutoffRow& row : table.rows) {
        out << row.index;
        cell(row.lambda.lambda1);
        cell(row.lambda.lambda2);
        cell(row.gamma);
        out << ',' << (row.weakly_informative ? 1 : 0) << '\n';
    }
}

}  // namespace vexbayes::weakinfo
