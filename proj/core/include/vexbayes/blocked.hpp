#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace vexbayes {

inline constexpr std::size_t kBufferAlignment = 64;

/// Supported kernel block widths. V=1 is the scalar reference mode.
bool is_supported_block_width(std::size_t v) noexcept;

/// Contiguous 64-byte-aligned array of doubles organized in blocks of
/// block_width lanes. The logical length (lanes) is padded up to a whole
/// number of blocks; padding lanes are zero-initialized and must never be
/// read as results.
class BlockedBuffer {
public:
    BlockedBuffer() = default;
    BlockedBuffer(std::size_t lanes, std::size_t block_width);

    double* data() noexcept { return data_.get(); }
    const double* data() const noexcept { return data_.get(); }

    std::size_t lanes() const noexcept { return lanes_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t block_width() const noexcept { return width_; }
    std::size_t blocks() const noexcept { return width_ ? capacity_ / width_ : 0; }
    std::size_t padding() const noexcept { return capacity_ - lanes_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> block(std::size_t b) noexcept {
        return {data_.get() + b * width_, width_};
    }
    std::span<const double> block(std::size_t b) const noexcept {
        return {data_.get() + b * width_, width_};
    }
    std::span<double> all() noexcept { return {data_.get(), capacity_}; }
    std::span<const double> all() const noexcept { return {data_.get(), capacity_}; }
    std::span<double> values() noexcept { return {data_.get(), lanes_}; }
    std::span<const double> values() const noexcept { return {data_.get(), lanes_}; }

private:
    struct Free {
        void operator()(double* p) const noexcept;
    };
    std::unique_ptr<double[], Free> data_;
    std::size_t lanes_ = 0;
    std::size_t capacity_ = 0;
    std::size_t width_ = 0;
};

/// Zero-initialized, padded, aligned buffer. Errors with invalid-shape when
/// lanes == 0 or the block width is unsupported.
BlockedBuffer create_buffer(std::size_t lanes, std::size_t block_width);

/// Static assignment of [0, total) to workers as contiguous disjoint ranges
/// with block-width-aligned boundaries except possibly at the tail.
struct WorkPartition {
    std::size_t total = 0;
    std::size_t workers = 0;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [begin, end)
};

WorkPartition partition(std::size_t total, std::size_t workers, std::size_t block_width);

}  // namespace vexbayes
