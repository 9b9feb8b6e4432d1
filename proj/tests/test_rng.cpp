#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "vexbayes/errors.hpp"
#include "vexbayes/rng.hpp"

using namespace vexbayes;

TEST_CASE("equal (seed, id) replays the identical sequence") {
    RngStream a = new_stream(1337, 0);
    RngStream b = new_stream(1337, 0);
    const auto xs = fill_uniform(a, 1000, 0.0, 1.0);
    const auto ys = fill_uniform(b, 1000, 0.0, 1.0);
    CHECK(xs == ys);
}

TEST_CASE("distinct stream ids diverge immediately") {
    RngStream a = new_stream(1337, 0);
    RngStream b = new_stream(1337, 1);
    const auto xs = fill_uniform(a, 16, 0.0, 1.0);
    const auto ys = fill_uniform(b, 16, 0.0, 1.0);
    CHECK(xs != ys);
}

TEST_CASE("streams under one seed are empirically uncorrelated") {
    const std::size_t n = 100000;
    RngStream a = new_stream(20240518, 0);
    RngStream b = new_stream(20240518, 1);
    const auto xs = fill_uniform(a, n, 0.0, 1.0);
    const auto ys = fill_uniform(b, n, 0.0, 1.0);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double r = sxy / std::sqrt(sxx * syy);
    CHECK(std::abs(r) < 0.02);
}

TEST_CASE("uniform fill: degenerate range is exact") {
    RngStream s = new_stream(7, 3);
    const auto xs = fill_uniform(s, 100, 3.0, 3.0);
    for (double x : xs) CHECK(x == 3.0);
    CHECK(s.counter_lo() == 100);  // stream still advances
}

TEST_CASE("uniform fill: sample mean near 1/2") {
    RngStream s = new_stream(99, 0);
    const auto xs = fill_uniform(s, 100000, 0.0, 1.0);
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    CHECK(m == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(m - 0.5) < 0.005);
}

TEST_CASE("uniform fill respects the half-open range") {
    RngStream s = new_stream(4242, 1);
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {0.0, 1.0}, {-3.0, 7.5}, {1e16, 1e16 + 4.0}, {250.0, 400.0}}) {
        const auto xs = fill_uniform(s, 4096, a, b);
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        CHECK(*lo >= a);
        CHECK(*hi < b);
    }
}

TEST_CASE("uniform fill rejects inverted ranges") {
    RngStream s = new_stream(1, 1);
    CHECK_THROWS_WITH_AS(fill_uniform(s, 4, 2.0, 1.0), doctest::Contains("invalid-range"),
                         Error);
}

TEST_CASE("gaussian fill: zero sigma is exact") {
    RngStream s = new_stream(8, 0);
    const auto xs = fill_gaussian(s, 100, 5.0, 0.0);
    for (double x : xs) CHECK(x == 5.0);
}

TEST_CASE("gaussian fill: sample variance near 1") {
    RngStream s = new_stream(31337, 2);
    const auto xs = fill_gaussian(s, 100000, 0.0, 1.0);
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    CHECK(std::abs(v - 1.0) < 0.03);
}

TEST_CASE("gaussian fill replays after a counter reset") {
    RngStream s = new_stream(555, 9);
    s.skip(12);
    const auto first = fill_gaussian(s, 64, 1.5, 2.0);
    s.set_counter(12);
    const auto second = fill_gaussian(s, 64, 1.5, 2.0);
    CHECK(first == second);
}

TEST_CASE("gaussian fill validates its arguments") {
    RngStream s = new_stream(0, 0);
    CHECK_THROWS_WITH_AS(fill_gaussian(s, 4, 0.0, -1.0), doctest::Contains("invalid-scale"),
                         Error);
    CHECK_THROWS_WITH_AS(fill_gaussian(s, 3, 0.0, 1.0), doctest::Contains("invalid-argument"),
                         Error);
}

TEST_CASE("outputs are a pure function of the counter position") {
    // one big fill equals the concatenation of arbitrary sub-fills
    RngStream s = new_stream(777, 5);
    const auto whole = fill_uniform(s, 100, 0.0, 1.0);
    s.set_counter(0);
    auto head = fill_uniform(s, 37, 0.0, 1.0);
    const auto tail = fill_uniform(s, 63, 0.0, 1.0);
    head.insert(head.end(), tail.begin(), tail.end());
    CHECK(whole == head);

    // the same holds for gaussians split on a pair boundary
    s.set_counter(0);
    const auto gwhole = fill_gaussian(s, 40, 0.0, 1.0);
    s.set_counter(0);
    auto ghead = fill_gaussian(s, 16, 0.0, 1.0);
    const auto gtail = fill_gaussian(s, 24, 0.0, 1.0);
    ghead.insert(ghead.end(), gtail.begin(), gtail.end());
    CHECK(gwhole == ghead);

    // single draws at a position match the bulk fill
    s.set_counter(21);
    CHECK(s.next_gaussian() == gwhole[21]);
    s.set_counter(20);
    CHECK(s.next_gaussian() == gwhole[20]);
}

TEST_CASE("replaying from an interior counter matches the original pass") {
    RngStream s = new_stream(123456789, 17);
    const auto whole = fill_uniform(s, 256, -1.0, 1.0);
    for (std::uint64_t offset : {1ull, 7ull, 128ull, 255ull}) {
        s.set_counter(offset);
        const auto part = fill_uniform(s, 256 - offset, -1.0, 1.0);
        for (std::size_t i = 0; i < part.size(); ++i) {
            CHECK(part[i] == whole[offset + i]);
        }
    }
}

TEST_CASE("uniform draws pass a Kolmogorov-Smirnov screen across seeds") {
    const std::size_t n = 10000;
    const double critical = 1.62762 / std::sqrt(static_cast<double>(n));  // alpha = 0.01
    int passed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RngStream s = new_stream(seed, 0);
        auto xs = fill_uniform(s, n, 0.0, 1.0);
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double hi = static_cast<double>(i + 1) / n - xs[i];
            const double lo = xs[i] - static_cast<double>(i) / n;
            d = std::max({d, hi, lo});
        }
        if (d < critical) ++passed;
    }
    CHECK(passed >= 95);
}

TEST_CASE("derived seeds with different paths give different streams") {
    const auto s1 = derive_seed(42, {1, 2, 3});
    const auto s2 = derive_seed(42, {1, 2, 4});
    const auto s3 = derive_seed(42, {1, 2});
    CHECK(s1 != s2);
    CHECK(s1 != s3);
    CHECK(derive_seed(42, {1, 2, 3}) == s1);
}
