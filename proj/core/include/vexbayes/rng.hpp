#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace vexbayes {

/// SplitMix64 finalizer; used for key and seed derivation.
std::uint64_t splitmix64(std::uint64_t z);

/// Derives an independent child seed from a parent seed and a path of
/// integers (task index, dataset index, role, ...). Distinct paths give
/// independent stream families.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Deterministic, platform-independent random stream identified by
/// (seed, stream_id). The generator is counter-based: a Philox-style keyed
/// permutation of a 128-bit position counter, keyed by a hash of seed and
/// stream id. Every output is a pure function of (seed, stream_id, counter),
/// so any position can be addressed directly via set_counter and replayed.
///
/// Position semantics:
///  * counter position p yields one 64-bit word / one uniform;
///  * the Gaussian at position p is defined on the pair m = p/2: both halves
///    of the Box-Muller pair consume the uniform words at positions 2m and
///    2m+1 (cos branch at even p, sin branch at odd p).
///
/// A stream is owned by one worker at a time; distinct streams are
/// independent and safe to use concurrently.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint32_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t counter_lo() const noexcept { return ctr_lo_; }
    std::uint64_t counter_hi() const noexcept { return ctr_hi_; }
    void set_counter(std::uint64_t lo, std::uint64_t hi = 0) noexcept;
    /// Advances the counter by n positions.
    void skip(std::uint64_t n) noexcept;
    /// Bumps the counter to the next even position (Gaussian pair boundary).
    void align_even() noexcept;

    std::uint64_t next_u64();
    /// One uniform draw in [0, 1) (53-bit mantissa construction).
    double next_unit();
    double next_uniform(double a, double b);
    double next_gaussian(double mu = 0.0, double sigma = 1.0);

    /// Fills out with uniforms in [a, b); requires a <= b (invalid-range).
    void fill_uniform(std::span<double> out, double a, double b);
    /// Fills out with N(mu, sigma^2); requires sigma >= 0 (invalid-scale) and
    /// out.size() even (invalid-argument) -- Box-Muller consumes pairs.
    void fill_gaussian(std::span<double> out, double mu, double sigma);

private:
    struct Block {
        std::uint64_t w0, w1;
    };
    Block block_at(std::uint64_t idx_lo, std::uint64_t idx_hi) const noexcept;
    const Block& current_pair_block();
    void advance() noexcept;

    std::uint64_t seed_ = 0;
    std::uint32_t stream_id_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t ctr_lo_ = 0;
    std::uint64_t ctr_hi_ = 0;
    std::uint64_t cache_lo_ = 0;
    std::uint64_t cache_hi_ = 0;
    Block cache_{0, 0};
    bool cache_valid_ = false;
};

/// Stream positioned at counter 0.
RngStream new_stream(std::uint64_t seed, std::uint32_t stream_id);

std::vector<double> fill_uniform(RngStream& stream, std::size_t n, double a, double b);
std::vector<double> fill_gaussian(RngStream& stream, std::size_t n, double mu, double sigma);

}  // namespace vexbayes
