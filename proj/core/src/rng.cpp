#include "vexbayes/rng.hpp"

#include <cmath>

#include "vexbayes/errors.hpp"
#include "vexbayes/fastmath.hpp"

namespace vexbayes {

namespace {

constexpr std::uint64_t kPhiloxMul = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ULL;
constexpr int kPhiloxRounds = 10;

inline double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t part : path) {
        h = splitmix64(h ^ part);
    }
    return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(splitmix64(splitmix64(seed) ^ stream_id)) {}

RngStream new_stream(std::uint64_t seed, std::uint32_t stream_id) {
    return RngStream(seed, stream_id);
}

void RngStream::set_counter(std::uint64_t lo, std::uint64_t hi) noexcept {
    ctr_lo_ = lo;
    ctr_hi_ = hi;
}

void RngStream::skip(std::uint64_t n) noexcept {
    const std::uint64_t old = ctr_lo_;
    ctr_lo_ += n;
    if (ctr_lo_ < old) ++ctr_hi_;
}

void RngStream::align_even() noexcept {
    if (ctr_lo_ & 1) skip(1);
}

void RngStream::advance() noexcept {
    if (++ctr_lo_ == 0) ++ctr_hi_;
}

RngStream::Block RngStream::block_at(std::uint64_t idx_lo, std::uint64_t idx_hi) const noexcept {
    std::uint64_t c0 = idx_lo;
    std::uint64_t c1 = idx_hi;
    std::uint64_t k = key_;
    for (int round = 0; round < kPhiloxRounds; ++round) {
        const auto prod = static_cast<unsigned __int128>(kPhiloxMul) * c0;
        const auto hi = static_cast<std::uint64_t>(prod >> 64);
        const auto lo = static_cast<std::uint64_t>(prod);
        c0 = hi ^ k ^ c1;
        c1 = lo;
        k += kPhiloxWeyl;
    }
    return {c0, c1};
}

const RngStream::Block& RngStream::current_pair_block() {
    const std::uint64_t pair_lo = (ctr_lo_ >> 1) | (ctr_hi_ << 63);
    const std::uint64_t pair_hi = ctr_hi_ >> 1;
    if (!cache_valid_ || cache_lo_ != pair_lo || cache_hi_ != pair_hi) {
        cache_ = block_at(pair_lo, pair_hi);
        cache_lo_ = pair_lo;
        cache_hi_ = pair_hi;
        cache_valid_ = true;
    }
    return cache_;
}

std::uint64_t RngStream::next_u64() {
    const Block& blk = current_pair_block();
    const std::uint64_t word = (ctr_lo_ & 1) ? blk.w1 : blk.w0;
    advance();
    return word;
}

double RngStream::next_unit() { return to_unit(next_u64()); }

double RngStream::next_uniform(double a, double b) {
    require(a <= b, "invalid-range", "uniform lower bound exceeds upper bound");
    const double u = next_unit();
    double r = a + u * (b - a);
    if (a < b) {
        const double top = std::nextafter(b, a);
        r = r < a ? a : (r > top ? top : r);
    }
    return r;
}

double RngStream::next_gaussian(double mu, double sigma) {
    require(sigma >= 0.0, "invalid-scale", "gaussian sigma must be nonnegative");
    const bool odd = (ctr_lo_ & 1) != 0;
    const Block& blk = current_pair_block();
    const double u1 = to_unit(blk.w0);
    const double u2 = to_unit(blk.w1);
    const double r = std::sqrt(-2.0 * fastmath::ln_pos(1.0 - u1));
    const double ang = 2.0 * u2;
    const double z = odd ? r * fastmath::sinpi(ang) : r * fastmath::cospi(ang);
    advance();
    return mu + sigma * z;
}

void RngStream::fill_uniform(std::span<double> out, double a, double b) {
    require(a <= b, "invalid-range", "uniform lower bound exceeds upper bound");
    if (a == b) {
        for (double& x : out) {
            next_u64();
            x = a;
        }
        return;
    }
    const double top = std::nextafter(b, a);
    const double width = b - a;
    for (double& x : out) {
        double r = a + next_unit() * width;
        x = r < a ? a : (r > top ? top : r);
    }
}

void RngStream::fill_gaussian(std::span<double> out, double mu, double sigma) {
    require(sigma >= 0.0, "invalid-scale", "gaussian sigma must be nonnegative");
    require(out.size() % 2 == 0, "invalid-argument",
            "gaussian fill length must be even (Box-Muller pairs)");
    std::size_t i = 0;
    if ((ctr_lo_ & 1) && i < out.size()) {
        out[i++] = next_gaussian(mu, sigma);
    }
    // aligned fast path: one Philox block per Box-Muller pair
    for (; i + 1 < out.size(); i += 2) {
        const Block& blk = current_pair_block();
        const double u1 = to_unit(blk.w0);
        const double u2 = to_unit(blk.w1);
        const double r = std::sqrt(-2.0 * fastmath::ln_pos(1.0 - u1));
        const double ang = 2.0 * u2;
        out[i] = mu + sigma * (r * fastmath::cospi(ang));
        out[i + 1] = mu + sigma * (r * fastmath::sinpi(ang));
        skip(2);
    }
    if (i < out.size()) {
        out[i] = next_gaussian(mu, sigma);
    }
}

std::vector<double> fill_uniform(RngStream& stream, std::size_t n, double a, double b) {
    std::vector<double> out(n);
    stream.fill_uniform(out, a, b);
    return out;
}

std::vector<double> fill_gaussian(RngStream& stream, std::size_t n, double mu, double sigma) {
    std::vector<double> out(n);
    stream.fill_gaussian(out, mu, sigma);
    return out;
}

}  // namespace vexbayes
