#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "vexbayes/errors.hpp"
#include "vexbayes/numeric.hpp"

using namespace vexbayes;

TEST_CASE("logsumexp handles large offsets and degenerate inputs") {
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(logsumexp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> degenerate{-inf, -inf};
    CHECK(logsumexp(degenerate) == -inf);
}

TEST_CASE("type-7 quantile interpolates order statistics") {
    std::vector<double> xs(100);
    for (int i = 0; i < 100; ++i) xs[i] = static_cast<double>(i + 1);
    CHECK(quantile(xs, 0.5) == doctest::Approx(50.5));
    CHECK(quantile(xs, 0.0) == 1.0);
    CHECK(quantile(xs, 1.0) == 100.0);

    const std::vector<double> ps{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    CHECK(quantile(ps, 0.5) == doctest::Approx(0.55));
}

TEST_CASE("cholesky factors SPD matrices and rejects singular ones") {
    // [[4, 2], [2, 3]] -> L = [[2, 0], [1, sqrt(2)]]
    std::vector<double> a{4.0, 2.0, 2.0, 3.0};
    REQUIRE(cholesky(a, 2));
    CHECK(a[0] == doctest::Approx(2.0));
    CHECK(a[1] == 0.0);
    CHECK(a[2] == doctest::Approx(1.0));
    CHECK(a[3] == doctest::Approx(std::sqrt(2.0)));

    std::vector<double> zero(4, 0.0);
    CHECK_FALSE(cholesky(zero, 2));
}

TEST_CASE("sample covariance of a known cloud") {
    // rows (0,0), (2,0), (0,2), (2,2): var = 4/3, cov = 0
    const std::vector<double> data{0, 0, 2, 0, 0, 2, 2, 2};
    const auto cov = sample_covariance(data, 4, 2);
    CHECK(cov[0] == doctest::Approx(4.0 / 3.0));
    CHECK(cov[3] == doctest::Approx(4.0 / 3.0));
    CHECK(cov[1] == doctest::Approx(0.0));
}

TEST_CASE("log binomial coefficients") {
    CHECK(log_binomial(5, 2) == doctest::Approx(std::log(10.0)));
    CHECK(log_binomial(5, 0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(log_binomial(3, 5), Error);
}
