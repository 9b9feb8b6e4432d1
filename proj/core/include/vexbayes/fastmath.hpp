#pragma once

#include <bit>
#include <cstdint>

// Branch-free polynomial elementary functions used inside blocked kernels and
// the random stream. Two properties matter more than the last ulp:
//
//  * results are a pure function of the operand bits (no libm, no platform
//    variation), so streams and kernels replay bit-identically everywhere;
//  * the bodies are straight-line arithmetic, so loops calling them remain
//    vectorizable under `omp simd` without fast-math.
//
// Relative accuracy is ~1e-15 for log2/exp2 and a few ulps beyond that for
// pow_pos over the library's domains (positive base, |exponent| <= ~16).

namespace vexbayes::fastmath {

inline constexpr double kLn2 = 0x1.62e42fefa39efp-1;
inline constexpr double kInvLn2 = 0x1.71547652b82fep+0;

/// log2(x) for finite x > 0.
inline double log2_pos(double x) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    std::int64_t e = static_cast<std::int64_t>((bits >> 52) & 0x7FF);
    if (e == 0) {  // subnormal input: renormalize
        bits = std::bit_cast<std::uint64_t>(x * 0x1p64);
        e = static_cast<std::int64_t>((bits >> 52) & 0x7FF) - 64;
    }
    e -= 1023;
    double m = std::bit_cast<double>((bits & 0xFFFFFFFFFFFFFULL) | 0x3FF0000000000000ULL);
    // center the mantissa on 1 so |log2(m)| <= 1/2
    const bool upper = m > 1.4142135623730951;
    m = upper ? 0.5 * m : m;
    const double ed = static_cast<double>(e + (upper ? 1 : 0));
    const double t = (m - 1.0) / (m + 1.0);
    const double s = t * t;
    // 2*atanh(t)/ln2 via the odd series in t
    double p = 1.0 / 21.0;
    p = p * s + 1.0 / 19.0;
    p = p * s + 1.0 / 17.0;
    p = p * s + 1.0 / 15.0;
    p = p * s + 1.0 / 13.0;
    p = p * s + 1.0 / 11.0;
    p = p * s + 1.0 / 9.0;
    p = p * s + 1.0 / 7.0;
    p = p * s + 1.0 / 5.0;
    p = p * s + 1.0 / 3.0;
    p = p * s + 1.0;
    return ed + (2.0 * kInvLn2) * t * p;
}

/// ln(x) for finite x > 0.
inline double ln_pos(double x) { return log2_pos(x) * kLn2; }

/// 2^z with the argument clamped to the normal range.
inline double exp2_clamped(double z) {
    z = z < -1022.0 ? -1022.0 : z;
    z = z > 1023.0 ? 1023.0 : z;
    const double rn = (z + 0x1.8p52) - 0x1.8p52;  // round to nearest integer
    const double w = (z - rn) * kLn2;             // |w| <= ln2/2
    double p = 1.0 / 6227020800.0;                // 1/13!
    p = p * w + 1.0 / 479001600.0;
    p = p * w + 1.0 / 39916800.0;
    p = p * w + 1.0 / 3628800.0;
    p = p * w + 1.0 / 362880.0;
    p = p * w + 1.0 / 40320.0;
    p = p * w + 1.0 / 5040.0;
    p = p * w + 1.0 / 720.0;
    p = p * w + 1.0 / 120.0;
    p = p * w + 1.0 / 24.0;
    p = p * w + 1.0 / 6.0;
    p = p * w + 0.5;
    p = p * w + 1.0;
    p = p * w + 1.0;
    const auto n = static_cast<std::int64_t>(rn);
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(n + 1023) << 52);
    return p * scale;
}

/// x^y for finite x > 0. Exact 1.0 when y == 0 or x == 1.
inline double pow_pos(double x, double y) { return exp2_clamped(y * log2_pos(x)); }

/// sin(pi*a) for a in [-2^50, 2^50].
inline double sinpi(double a) {
    const double rn = (a + 0x1.8p52) - 0x1.8p52;
    const double r = a - rn;  // [-1/2, 1/2]
    const double s = r * 3.141592653589793238462643383279502884;
    const double s2 = s * s;
    double p = 1.0 / 51090942171709440000.0;  // 1/21!
    p = p * s2 - 1.0 / 121645100408832000.0;
    p = p * s2 + 1.0 / 355687428096000.0;
    p = p * s2 - 1.0 / 1307674368000.0;
    p = p * s2 + 1.0 / 6227020800.0;
    p = p * s2 - 1.0 / 39916800.0;
    p = p * s2 + 1.0 / 362880.0;
    p = p * s2 - 1.0 / 5040.0;
    p = p * s2 + 1.0 / 120.0;
    p = p * s2 - 1.0 / 6.0;
    p = p * s2 + 1.0;
    const double base = s * p;
    const auto n = static_cast<std::int64_t>(rn);
    const double sign = (n & 1) ? -1.0 : 1.0;
    return sign * base;
}

/// cos(pi*a) for a in [-2^50, 2^50].
inline double cospi(double a) {
    const double rn = (a + 0x1.8p52) - 0x1.8p52;
    const double r = a - rn;  // [-1/2, 1/2]
    const double s = r * 3.141592653589793238462643383279502884;
    const double s2 = s * s;
    double p = -1.0 / 1124000727777607680000.0;  // -1/22!
    p = p * s2 + 1.0 / 2432902008176640000.0;
    p = p * s2 - 1.0 / 6402373705728000.0;
    p = p * s2 + 1.0 / 20922789888000.0;
    p = p * s2 - 1.0 / 87178291200.0;
    p = p * s2 + 1.0 / 479001600.0;
    p = p * s2 - 1.0 / 3628800.0;
    p = p * s2 + 1.0 / 40320.0;
    p = p * s2 - 1.0 / 720.0;
    p = p * s2 + 1.0 / 24.0;
    p = p * s2 - 1.0 / 2.0;
    p = p * s2 + 1.0;
    const auto n = static_cast<std::int64_t>(rn);
    const double sign = (n & 1) ? -1.0 : 1.0;
    return sign * p;
}

}  // namespace vexbayes::fastmath
