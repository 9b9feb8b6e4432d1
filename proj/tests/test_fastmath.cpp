#include <doctest.h>

#include <cmath>
#include <vector>

#include "vexbayes/fastmath.hpp"

using namespace vexbayes;

namespace {

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("log2 matches libm over the kernel domain") {
    for (double x : {1e-6, 0.001, 0.3, 0.9999, 1.0000001, 1.5, 2.0, 10.0, 325.0, 1650.0, 1e8}) {
        CHECK(rel_err(fastmath::log2_pos(x), std::log2(x)) < 1e-14);
    }
    CHECK(fastmath::log2_pos(1.0) == 0.0);
    CHECK(fastmath::log2_pos(2.0) == 1.0);
}

TEST_CASE("exp2 matches libm") {
    for (double z : {-700.0, -30.0, -1.25, -0.4999, 0.0, 0.5, 1.0, 13.7, 100.0, 900.0}) {
        CHECK(rel_err(fastmath::exp2_clamped(z), std::exp2(z)) < 1e-14);
    }
    CHECK(fastmath::exp2_clamped(0.0) == 1.0);
}

TEST_CASE("pow matches libm over the SDE kernel domain") {
    double worst = 0.0;
    for (double base : {1.0, 1.01, 2.5, 10.0, 42.0, 400.0, 1650.0}) {
        for (double exp : {0.0, 0.05, 0.2, 0.35, 1.0, 3.5, 6.999, 7.0}) {
            worst = std::max(worst, rel_err(fastmath::pow_pos(base, exp), std::pow(base, exp)));
        }
    }
    CHECK(worst < 5e-13);
}

TEST_CASE("pow exactness at the algebraic identities") {
    CHECK(fastmath::pow_pos(10.0, 0.0) == 1.0);
    CHECK(fastmath::pow_pos(1650.0, 0.0) == 1.0);
    CHECK(fastmath::pow_pos(1.0, 6.3) == 1.0);
    CHECK(fastmath::pow_pos(1.0, 0.0) == 1.0);
}

TEST_CASE("sinpi/cospi match libm on [0, 2)") {
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double a = 2.0 * static_cast<double>(i) / 2000.0;
        worst = std::max(worst, std::abs(fastmath::sinpi(a) - std::sin(M_PI * a)));
        worst = std::max(worst, std::abs(fastmath::cospi(a) - std::cos(M_PI * a)));
    }
    CHECK(worst < 1e-13);
    CHECK(fastmath::sinpi(0.0) == 0.0);
    CHECK(fastmath::cospi(0.0) == 1.0);
}

TEST_CASE("ln matches libm") {
    for (double x : {1e-300, 2.2e-16, 0.5, 1.0, 1.0 - 0x1.0p-53, 3.7, 1e10}) {
        if (x == 1.0) {
            CHECK(fastmath::ln_pos(x) == 0.0);
        } else {
            CHECK(rel_err(fastmath::ln_pos(x), std::log(x)) < 1e-13);
        }
    }
}
