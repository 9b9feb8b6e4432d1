#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"
#include "vexbayes/rng.hpp"
#include "vexbayes/toggle_switch.hpp"

using namespace vexbayes;
using namespace vexbayes::toggle;

namespace {

// Independent reference: evolves one cell at a time in the naive per-cell
// style, reading each variate directly from its canonical stream position.
std::vector<double> naive_simulate(const ToggleParams& theta, std::size_t steps,
                                   std::size_t cells, std::uint64_t seed, std::uint32_t id) {
    RngStream stream(seed, id);
    stream.align_even();
    const std::uint64_t base = stream.counter_lo();
    const std::size_t stride = cell_stride(steps);

    std::vector<double> y(cells);
    std::array<double, 2> pair;
    for (std::size_t c = 0; c < cells; ++c) {
        double u = 10.0, v = 10.0;
        for (std::size_t j = 1; j < steps; ++j) {
            stream.set_counter(base + c * stride + 2 * (j - 1));
            stream.fill_gaussian(pair, 0.0, 1.0);
            const double p_u = fastmath::pow_pos(v, theta.beta_u);
            const double p_v = fastmath::pow_pos(u, theta.beta_v);
            double ut = u * 0.97;
            ut += theta.alpha_u / (1.0 + p_u) - 1.0;
            double vt = v * 0.97;
            vt += theta.alpha_v / (1.0 + p_v) - 1.0;
            ut += 0.5 * pair[0];
            vt += 0.5 * pair[1];
            u = ut >= 1.0 ? ut : 1.0;
            v = vt >= 1.0 ? vt : 1.0;
        }
        stream.set_counter(base + c * stride + 2 * (steps - 1));
        stream.fill_gaussian(pair, 0.0, 1.0);
        const double obs =
            u + theta.mu + theta.sigma * theta.mu * pair[0] / fastmath::pow_pos(u, theta.gamma);
        y[c] = obs >= 1.0 ? obs : 1.0;
    }
    return y;
}

ToggleParams prior_draw(std::uint64_t seed) {
    RngStream stream(seed, 77);
    return sample_prior(stream);
}

}  // namespace

TEST_CASE("prior mapping hits the documented box and midpoints") {
    const std::array<double, 7> mid{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    const ToggleParams theta = params_from_unit(mid);
    CHECK(theta.mu == doctest::Approx(325.0));
    CHECK(theta.sigma == doctest::Approx(0.275));
    CHECK(theta.gamma == doctest::Approx(0.2));
    CHECK(theta.alpha_u == doctest::Approx(25.0));
    CHECK(theta.alpha_v == doctest::Approx(25.0));
    CHECK(theta.beta_u == doctest::Approx(3.5));
    CHECK(theta.beta_v == doctest::Approx(3.5));

    RngStream stream(2024, 0);
    for (int i = 0; i < 1000; ++i) {
        const ToggleParams draw = sample_prior(stream);
        CHECK(draw.mu >= 250.0);
        CHECK(draw.mu < 400.0);
        CHECK(draw.sigma >= 0.05);
        CHECK(draw.sigma < 0.5);
        CHECK(draw.gamma >= 0.05);
        CHECK(draw.gamma < 0.35);
        CHECK(draw.alpha_u >= 0.0);
        CHECK(draw.alpha_u < 50.0);
        CHECK(draw.beta_v >= 0.0);
        CHECK(draw.beta_v < 7.0);
    }
}

TEST_CASE("prior sampling is deterministic per stream") {
    RngStream a(1, 0), b(1, 0);
    const auto ta = sample_prior(a).as_array();
    sample_prior(a);
    const auto tb = sample_prior(b).as_array();
    CHECK(ta == tb);
}

TEST_CASE("one noise-free Euler step matches hand evaluation") {
    const std::vector<double> xi(2, 0.0);
    const std::vector<double> eta(1, 0.0);
    std::vector<double> u{10.0}, v{10.0}, y(1);

    // no inhibition: u <- 0.97*10 - 1 = 8.7 (mu = 0 makes y = u)
    ToggleParams theta{0.0, 0.1, 0.2, 0.0, 0.0, 2.0, 2.0};
    simulate_block(theta, 2, {u, v}, xi, eta, y);
    CHECK(y[0] == doctest::Approx(8.7));
    CHECK(u[0] == doctest::Approx(8.7));

    // beta_u = 0 turns the inhibition term into alpha_u/2
    u[0] = 10.0;
    v[0] = 10.0;
    theta.alpha_u = 2.0;
    theta.beta_u = 0.0;
    simulate_block(theta, 2, {u, v}, xi, eta, y);
    CHECK(u[0] == doctest::Approx(9.7));
}

TEST_CASE("simulate rejects too-short horizons") {
    RngStream stream(3, 0);
    const ToggleParams theta = prior_draw(11);
    CHECK_THROWS_WITH_AS(simulate(theta, 1, 8, stream, 4), doctest::Contains("invalid-horizon"),
                         Error);
}

TEST_CASE("blocked execution is bit-identical to the per-cell reference") {
    const std::size_t steps = 50, cells = 64;
    const ToggleParams theta = prior_draw(31);
    const auto reference = naive_simulate(theta, steps, cells, 99, 4);
    for (std::size_t v : {1u, 2u, 4u, 8u}) {
        RngStream stream(99, 4);
        const ObservationSet obs = simulate(theta, steps, cells, stream, v);
        REQUIRE(obs.y.size() == cells);
        for (std::size_t c = 0; c < cells; ++c) {
            CHECK(obs.y[c] == reference[c]);
        }
    }
}

TEST_CASE("small blocked/scalar cross-check at C=4") {
    const ToggleParams theta = prior_draw(5);
    RngStream a(7, 0), b(7, 0);
    const auto y4 = simulate(theta, 3, 4, a, 4);
    const auto y1 = simulate(theta, 3, 4, b, 1);
    CHECK(y4.y == y1.y);
    CHECK(a.counter_lo() == b.counter_lo());
}

TEST_CASE("simulate is deterministic and respects the observation floor") {
    const ToggleParams theta = prior_draw(13);
    RngStream a(71, 2), b(71, 2);
    const auto first = simulate(theta, 60, 500, a, 8);
    const auto second = simulate(theta, 60, 500, b, 8);
    CHECK(first.y == second.y);
    for (double y : first.y) CHECK(y >= 1.0);
}

TEST_CASE("noise-free dynamics without inhibition reach the floor quickly") {
    const std::size_t steps = 81;
    const std::size_t lanes = 1;
    const std::vector<double> xi(2 * lanes * (steps - 1), 0.0);
    const std::vector<double> eta(lanes, 0.0);
    std::vector<double> u{10.0}, v{10.0}, y(1);
    const ToggleParams theta{0.0, 0.0, 0.2, 0.0, 0.0, 1.0, 1.0};
    simulate_block(theta, steps, {u, v}, xi, eta, y);
    CHECK(u[0] == 1.0);
    CHECK(v[0] == 1.0);
}

TEST_CASE("summary quantiles: degenerate, linear, monotone") {
    ObservationSet constant{std::vector<double>(50, 7.0)};
    for (double q : summary_quantiles(constant)) CHECK(q == 7.0);

    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i) ramp[i] = static_cast<double>(i + 1);
    const auto q = summary_quantiles(ObservationSet{ramp});
    CHECK(q[9] == doctest::Approx(50.5));  // level 0.50
    for (std::size_t k = 1; k < q.size(); ++k) CHECK(q[k] >= q[k - 1]);

    ObservationSet tiny{std::vector<double>(10, 1.0)};
    CHECK_THROWS_WITH_AS(summary_quantiles(tiny), doctest::Contains("insufficient-data"), Error);
}

TEST_CASE("full-run mean and quantile summaries match the scalar rerun bit-exactly") {
    const std::size_t steps = 80, cells = 512;
    const ToggleParams theta = prior_draw(47);
    RngStream blocked(2025, 3);
    const ObservationSet obs = simulate(theta, steps, cells, blocked, 8);
    const auto reference = naive_simulate(theta, steps, cells, 2025, 3);

    double mean_blocked = 0.0, mean_ref = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        mean_blocked += obs.y[c];
        mean_ref += reference[c];
    }
    CHECK(mean_blocked == mean_ref);
    const auto qa = summary_quantiles(obs);
    const auto qb = summary_quantiles(ObservationSet{reference});
    CHECK(qa == qb);
}
