#include "vexbayes/smc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"
#include "vexbayes/numeric.hpp"

namespace vexbayes::smc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::size_t kRolePilot = 0;
constexpr std::size_t kRoleMove = 1;
constexpr std::size_t kRoleTrial = 2;
constexpr std::size_t kRoleCoordinator = 3;

std::uint32_t stream_id_for(std::size_t iteration, std::size_t worker, std::size_t role) {
    return static_cast<std::uint32_t>((iteration << 16) | (worker << 2) | role);
}

void eval_block_ll(const ModelHooks& model, std::span<const double> params, std::size_t lanes,
                   std::span<double> out) {
    if (model.block_log_likelihood) {
        model.block_log_likelihood(params, lanes, out);
        return;
    }
    const std::size_t d = params.size() / lanes;
    for (std::size_t l = 0; l < lanes; ++l) {
        out[l] = model.log_likelihood(params.subspan(l * d, d));
    }
}

void refresh_caches_range(ParticleEnsemble& ens, const ModelHooks& model, std::size_t begin,
                          std::size_t end, std::size_t block_width) {
    const std::size_t d = ens.dim;
    for (std::size_t q0 = begin; q0 < end; q0 += block_width) {
        const std::size_t lanes = std::min(block_width, end - q0);
        eval_block_ll(model, std::span<const double>(ens.particles.data() + q0 * d, lanes * d),
                      lanes, std::span<double>(ens.log_liks.data() + q0, lanes));
    }
    for (std::size_t i = begin; i < end; ++i) ens.log_priors[i] = model.log_prior(ens.row(i));
}

void run_workers(std::size_t workers, const std::function<void(std::size_t)>& body) {
    if (workers == 1) {
        body(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
}

// One-stream tempered random-walk sweep over particles [begin, end).
//
// Variates are addressed by a canonical per-particle layout in the stream's
// counter space: with q the particle index relative to `begin`, d_e the
// even-padded dimension and R the step count, the Gaussian increments of
// step r live at base + q*R*d_e + r*d_e and the acceptance uniform at
// base + n*R*d_e + q*R + r. Each block pre-draws its (contiguous) share in
// one Gaussian and one uniform fill before the step loop. The assignment is
// independent of the block width, so accept decisions replay exactly across
// widths.
MoveStats move_range(ParticleEnsemble& ens, std::size_t begin, std::size_t end,
                     const ProposalKernel& kernel, const ModelHooks& model, double t_n,
                     std::size_t block_width, RngStream& stream, std::size_t steps,
                     std::span<const double> lane_scales, std::vector<double>* jump_sq) {
    MoveStats stats;
    const std::size_t n_range = end - begin;
    if (n_range == 0 || steps == 0) return stats;

    const std::size_t d = ens.dim;
    const std::size_t de = d + (d & 1);
    const std::size_t gauss_total = n_range * steps * de;

    stream.align_even();
    const std::uint64_t base_lo = stream.counter_lo();
    const std::uint64_t base_hi = stream.counter_hi();
    const auto seek = [&](std::uint64_t offset) {
        const std::uint64_t lo = base_lo + offset;
        stream.set_counter(lo, base_hi + (lo < base_lo ? 1 : 0));
    };

    const double* L = kernel.cholesky.data();
    std::vector<double> gauss(block_width * steps * de);
    std::vector<double> unif(block_width * steps);
    std::vector<double> prop(block_width * d);
    std::vector<double> ll_star(block_width);
    std::vector<double> lp_star(block_width);

    for (std::size_t q0 = 0; q0 < n_range; q0 += block_width) {
        const std::size_t lanes = std::min(block_width, n_range - q0);
        seek(q0 * steps * de);
        stream.fill_gaussian(std::span<double>(gauss.data(), lanes * steps * de), 0.0, 1.0);
        seek(gauss_total + q0 * steps);
        stream.fill_uniform(std::span<double>(unif.data(), lanes * steps), 0.0, 1.0);

        for (std::size_t r = 0; r < steps; ++r) {
            for (std::size_t l = 0; l < lanes; ++l) {
                const std::size_t i = begin + q0 + l;
                const double h = lane_scales.empty() ? kernel.scale : lane_scales[i];
                const double* z = gauss.data() + l * steps * de + r * de;
                const double* cur = ens.particles.data() + i * d;
                double* p = prop.data() + l * d;
                for (std::size_t k = 0; k < d; ++k) {
                    double inc = 0.0;
                    for (std::size_t m = 0; m <= k; ++m) inc += L[k * d + m] * z[m];
                    p[k] = cur[k] + h * inc;
                }
                lp_star[l] = model.log_prior(std::span<const double>(p, d));
            }
            eval_block_ll(model, std::span<const double>(prop.data(), lanes * d), lanes,
                          std::span<double>(ll_star.data(), lanes));
            for (std::size_t l = 0; l < lanes; ++l) {
                const std::size_t i = begin + q0 + l;
                const double log_alpha = t_n * (ll_star[l] - ens.log_liks[i]) + lp_star[l] -
                                         ens.log_priors[i];
                const double u = unif[l * steps + r];
                const double log_u = u > 0.0 ? fastmath::ln_pos(u) : kNegInf;
                ++stats.proposals;
                if (!std::isnan(log_alpha) && log_alpha > kNegInf && log_u <= log_alpha) {
                    ++stats.accepted;
                    std::copy_n(prop.data() + l * d, d, ens.particles.data() + i * d);
                    ens.log_liks[i] = ll_star[l];
                    ens.log_priors[i] = lp_star[l];
                    if (jump_sq) {
                        const double h = lane_scales.empty() ? kernel.scale : lane_scales[i];
                        const double* z = gauss.data() + l * steps * de + r * de;
                        double zz = 0.0;
                        for (std::size_t k = 0; k < d; ++k) zz += z[k] * z[k];
                        (*jump_sq)[i] += h * h * zz;
                    }
                }
            }
        }
    }

    seek(gauss_total + n_range * steps);
    return stats;
}

using SweepFn = std::function<MoveStats(const ProposalKernel&, std::size_t steps,
                                        std::span<const double> lane_scales,
                                        std::vector<double>* jump_sq)>;

EsjdResult esjd_core(ParticleEnsemble& ens, std::span<const double> scales, double jitter,
                     std::size_t sweep_cap, const SweepFn& trial_sweep,
                     const SweepFn& move_sweep) {
    require(!scales.empty(), "invalid-argument", "scale grid must not be empty");
    const std::size_t np = ens.count;

    ProposalKernel kernel = make_kernel(ens, 1.0, jitter);
    std::vector<double> lane(np);
    for (std::size_t i = 0; i < np; ++i) lane[i] = scales[i % scales.size()];

    std::vector<double> jumps(np, 0.0);
    const MoveStats trial = trial_sweep(kernel, 1, lane, &jumps);

    EsjdResult res;
    res.trial_acceptance = trial.acceptance_rate();
    res.trial_median = median(jumps);

    double best = -1.0;
    bool any_jump = false;
    std::vector<double> per_scale;
    for (std::size_t s = 0; s < scales.size(); ++s) {
        per_scale.clear();
        for (std::size_t i = s; i < np; i += scales.size()) per_scale.push_back(jumps[i]);
        if (per_scale.empty()) continue;
        const double med = median(per_scale);
        if (med > 0.0) any_jump = true;
        if (med > best) {
            best = med;
            res.h_opt = scales[s];
        }
    }
    if (!any_jump) {
        for (double j : jumps) any_jump = any_jump || j > 0.0;
    }
    if (!any_jump) res.h_opt = 2.38 / std::sqrt(static_cast<double>(ens.dim));

    kernel.scale = res.h_opt;
    std::vector<double>& cumulative = jumps;
    while (res.sweeps < sweep_cap) {
        std::size_t moved = 0;
        for (double c : cumulative) {
            if (c > res.trial_median) ++moved;
        }
        if (2 * moved >= np) break;
        move_sweep(kernel, 1, {}, &cumulative);
        ++res.sweeps;
    }
    return res;
}

}  // namespace

double ess(std::span<const double> log_weights) {
    double m = kNegInf;
    for (double w : log_weights) m = std::max(m, w);
    require(m > kNegInf, "degenerate-ensemble", "all weights are zero");
    double s1 = 0.0, s2 = 0.0;
    for (double w : log_weights) {
        const double e = std::exp(w - m);
        s1 += e;
        s2 += e * e;
    }
    return s1 * s1 / s2;
}

double find_temperature(const ParticleEnsemble& ensemble, double tolerance) {
    require(ensemble.temperature < 1.0, "invalid-argument", "temperature is already 1");
    const std::size_t np = ensemble.count;
    const double target = static_cast<double>(np) / 2.0;

    const auto ess_at = [&](double dt) {
        double m = kNegInf;
        for (std::size_t i = 0; i < np; ++i) {
            m = std::max(m, ensemble.log_weights[i] + dt * ensemble.log_liks[i]);
        }
        if (m == kNegInf) return 0.0;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            const double e = std::exp(ensemble.log_weights[i] + dt * ensemble.log_liks[i] - m);
            s1 += e;
            s2 += e * e;
        }
        return s1 * s1 / s2;
    };

    const double span_dt = 1.0 - ensemble.temperature;
    if (ess_at(span_dt) >= target) return 1.0;
    double lo = 0.0, hi = span_dt;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (ess_at(mid) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return ensemble.temperature + 0.5 * (lo + hi);
}

void reweight_and_update_evidence(ParticleEnsemble& ensemble, double t_next) {
    require(t_next > ensemble.temperature, "invalid-argument",
            "next temperature must exceed the current one");
    const double dt = t_next - ensemble.temperature;
    const double before = logsumexp(ensemble.log_weights);
    for (std::size_t i = 0; i < ensemble.count; ++i) {
        ensemble.log_weights[i] += dt * ensemble.log_liks[i];
    }
    const double after = logsumexp(ensemble.log_weights);
    ensemble.log_evidence += after - before;
    ensemble.temperature = t_next;
}

void resample_multinomial(ParticleEnsemble& ensemble, RngStream& stream) {
    const std::size_t np = ensemble.count;
    const std::size_t d = ensemble.dim;
    double m = kNegInf;
    for (double w : ensemble.log_weights) m = std::max(m, w);
    require(m > kNegInf, "degenerate-ensemble", "all weights are zero");

    std::vector<double> cum(np);
    double run = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        run += std::exp(ensemble.log_weights[i] - m);
        cum[i] = run;
    }
    require(std::isfinite(run) && run > 0.0, "degenerate-ensemble", "weight sum is not finite");

    std::vector<double> particles(np * d), lls(np);
    const bool has_priors = ensemble.log_priors.size() == np;
    std::vector<double> lps(has_priors ? np : 0);
    for (std::size_t i = 0; i < np; ++i) {
        const double target = stream.next_unit() * run;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        std::size_t idx = static_cast<std::size_t>(it - cum.begin());
        if (idx >= np) idx = np - 1;
        std::copy_n(ensemble.particles.data() + idx * d, d, particles.data() + i * d);
        lls[i] = ensemble.log_liks[idx];
        if (has_priors) lps[i] = ensemble.log_priors[idx];
    }
    ensemble.particles = std::move(particles);
    ensemble.log_liks = std::move(lls);
    if (has_priors) ensemble.log_priors = std::move(lps);
    std::fill(ensemble.log_weights.begin(), ensemble.log_weights.end(),
              -std::log(static_cast<double>(np)));
}

std::size_t steps_from_acceptance(double p_acc, double c, std::size_t step_cap) {
    require(c > 0.0 && c < 1.0, "invalid-argument", "tuning constant must lie in (0, 1)");
    const double p = std::clamp(p_acc, 0.01, 0.99);
    const double raw = std::ceil(std::log(c) / std::log(1.0 - p));
    if (!(raw >= 1.0)) return 1;
    const auto steps = static_cast<std::size_t>(raw);
    return std::min(steps, step_cap);
}

ProposalKernel make_kernel(const ParticleEnsemble& ensemble, double scale, double jitter) {
    require(ensemble.count >= 2, "degenerate-ensemble", "need at least two particles");
    ProposalKernel kernel;
    kernel.dim = ensemble.dim;
    kernel.scale = scale;
    kernel.covariance = sample_covariance(ensemble.particles, ensemble.count, ensemble.dim);
    kernel.cholesky = kernel.covariance;
    if (!cholesky(kernel.cholesky, kernel.dim)) {
        for (std::size_t k = 0; k < kernel.dim; ++k) kernel.covariance[k * kernel.dim + k] += jitter;
        kernel.cholesky = kernel.covariance;
        require(cholesky(kernel.cholesky, kernel.dim), "degenerate-ensemble",
                "covariance is rank deficient beyond jitter");
    }
    return kernel;
}

MoveStats mcmc_block_move(ParticleEnsemble& ensemble, const ProposalKernel& kernel,
                          const ModelHooks& model, double t_n, std::size_t block_width,
                          RngStream& stream, std::size_t steps,
                          std::span<const double> lane_scales, std::vector<double>* jump_sq) {
    require(is_supported_block_width(block_width), "invalid-shape", "unsupported block width");
    if (ensemble.log_priors.size() != ensemble.count ||
        ensemble.log_liks.size() != ensemble.count) {
        ensemble.log_liks.assign(ensemble.count, 0.0);
        ensemble.log_priors.assign(ensemble.count, 0.0);
        refresh_caches_range(ensemble, model, 0, ensemble.count, block_width);
    }
    return move_range(ensemble, 0, ensemble.count, kernel, model, t_n, block_width, stream,
                      steps ? steps : kernel.steps, lane_scales, jump_sq);
}

EsjdResult esjd_select_scale(ParticleEnsemble& ensemble, const ModelHooks& model, double t_n,
                             std::span<const double> scales, std::size_t block_width,
                             RngStream& stream, double jitter, std::size_t sweep_cap) {
    const SweepFn sweep = [&](const ProposalKernel& k, std::size_t steps,
                              std::span<const double> lane, std::vector<double>* jumps) {
        return mcmc_block_move(ensemble, k, model, t_n, block_width, stream, steps, lane, jumps);
    };
    return esjd_core(ensemble, scales, jitter, sweep_cap, sweep, sweep);
}

SmcResult run_smc(const ModelHooks& model, const SmcConfig& config) {
    require(model.dim >= 1, "invalid-model", "model dimension must be positive");
    require(static_cast<bool>(model.sample_prior) && static_cast<bool>(model.log_prior) &&
                (static_cast<bool>(model.log_likelihood) ||
                 static_cast<bool>(model.block_log_likelihood)),
            "invalid-model", "model must provide prior and likelihood hooks");
    require(is_supported_block_width(config.block_width), "invalid-shape",
            "unsupported block width");
    require(config.particles >= 2 * config.block_width, "invalid-shape",
            "need at least two particle blocks");
    require(config.workers >= 1 && config.workers < (1u << 14), "invalid-shape",
            "worker count out of range");

    const std::size_t np = config.particles;
    const std::size_t d = model.dim;
    const std::size_t v = config.block_width;
    const std::size_t workers = config.workers;

    ParticleEnsemble ens;
    ens.count = np;
    ens.dim = d;
    ens.particles.assign(np * d, 0.0);
    ens.log_weights.assign(np, -std::log(static_cast<double>(np)));
    ens.log_liks.assign(np, 0.0);
    ens.log_priors.assign(np, 0.0);

    const WorkPartition part = partition(np, workers, v);

    const auto make_streams = [&](std::size_t iteration, std::size_t role) {
        std::vector<RngStream> streams;
        streams.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            streams.emplace_back(config.seed, stream_id_for(iteration, w, role));
        }
        return streams;
    };

    {
        auto streams = make_streams(0, kRolePilot);
        run_workers(workers, [&](std::size_t w) {
            const auto [begin, end] = part.ranges[w];
            for (std::size_t i = begin; i < end; ++i) model.sample_prior(streams[w], ens.row(i));
            refresh_caches_range(ens, model, begin, end, v);
        });
    }

    bool any_finite = false;
    for (double ll : ens.log_liks) {
        require(!std::isnan(ll) && ll < std::numeric_limits<double>::infinity(), "invalid-model",
                "log-likelihood is not finite at initialization");
        any_finite = any_finite || ll > kNegInf;
    }
    require(any_finite, "invalid-model", "likelihood is zero for every initial particle");

    if (config.trace) *config.trace << "n,t_n,ess,log_evidence,R_n,p_acc,h\n";

    const double default_scale = 2.38 / std::sqrt(static_cast<double>(d));

    const auto parallel_sweep = [&](const ProposalKernel& kernel, std::size_t steps,
                                    std::vector<RngStream>& streams,
                                    std::span<const double> lane_scales,
                                    std::vector<double>* jump_sq) {
        std::vector<MoveStats> partial(workers);
        run_workers(workers, [&](std::size_t w) {
            const auto [begin, end] = part.ranges[w];
            partial[w] = move_range(ens, begin, end, kernel, model, ens.temperature, v,
                                    streams[w], steps, lane_scales, jump_sq);
        });
        MoveStats total;
        for (const MoveStats& s : partial) {
            total.proposals += s.proposals;
            total.accepted += s.accepted;
        }
        return total;
    };

    std::size_t n = 0;
    while (ens.temperature < 1.0) {
        ++n;
        require(n <= config.max_iterations, "non-convergence",
                "temperature failed to reach 1 within the iteration cap");
        ens.iteration = n;

        const double t_next = find_temperature(ens, config.bisection_tol);
        reweight_and_update_evidence(ens, t_next);
        const double ess_now = ess(ens.log_weights);

        {
            RngStream coordinator(config.seed, stream_id_for(n, 0, kRoleCoordinator));
            resample_multinomial(ens, coordinator);
        }

        double h_used = 0.0;
        double p_acc = 0.0;
        std::size_t steps_used = 0;
        if (!config.esjd) {
            h_used = config.scale > 0.0 ? config.scale : default_scale;
            ProposalKernel kernel = make_kernel(ens, h_used, config.jitter);
            auto pilot_streams = make_streams(n, kRolePilot);
            const MoveStats pilot = parallel_sweep(kernel, 1, pilot_streams, {}, nullptr);
            p_acc = pilot.acceptance_rate();
            steps_used = steps_from_acceptance(p_acc, config.c, config.step_cap);
            kernel.steps = steps_used;
            kernel.acceptance_estimate = p_acc;
            auto move_streams = make_streams(n, kRoleMove);
            parallel_sweep(kernel, steps_used, move_streams, {}, nullptr);
        } else {
            auto trial_streams = make_streams(n, kRoleTrial);
            auto move_streams = make_streams(n, kRoleMove);
            const SweepFn trial = [&](const ProposalKernel& k, std::size_t steps,
                                      std::span<const double> lane, std::vector<double>* jumps) {
                return parallel_sweep(k, steps, trial_streams, lane, jumps);
            };
            const SweepFn mover = [&](const ProposalKernel& k, std::size_t steps,
                                      std::span<const double> lane, std::vector<double>* jumps) {
                return parallel_sweep(k, steps, move_streams, lane, jumps);
            };
            const EsjdResult er =
                esjd_core(ens, config.esjd_scales, config.jitter, config.step_cap, trial, mover);
            h_used = er.h_opt;
            p_acc = er.trial_acceptance;
            steps_used = er.sweeps;
        }

        if (config.trace) {
            *config.trace << n << ',' << ens.temperature << ',' << ess_now << ','
                          << ens.log_evidence << ',' << steps_used << ',' << p_acc << ','
                          << h_used << '\n';
        }
    }

    SmcResult result;
    result.log_evidence = ens.log_evidence;
    result.iterations = n;
    result.ensemble = std::move(ens);
    return result;
}

}  // namespace vexbayes::smc
