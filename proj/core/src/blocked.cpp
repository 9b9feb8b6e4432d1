#include "vexbayes/blocked.hpp"

#include <cstdlib>
#include <cstring>

#include "vexbayes/errors.hpp"

namespace vexbayes {

bool is_supported_block_width(std::size_t v) noexcept {
    return v == 1 || v == 2 || v == 4 || v == 8 || v == 16;
}

void BlockedBuffer::Free::operator()(double* p) const noexcept { std::free(p); }

BlockedBuffer::BlockedBuffer(std::size_t lanes, std::size_t block_width)
    : lanes_(lanes), width_(block_width) {
    capacity_ = (lanes + block_width - 1) / block_width * block_width;
    std::size_t bytes = capacity_ * sizeof(double);
    bytes = (bytes + kBufferAlignment - 1) / kBufferAlignment * kBufferAlignment;
    auto* p = static_cast<double*>(std::aligned_alloc(kBufferAlignment, bytes));
    require(p != nullptr, "io-error", "aligned allocation failed");
    std::memset(p, 0, bytes);
    data_.reset(p);
}

BlockedBuffer create_buffer(std::size_t lanes, std::size_t block_width) {
    require(lanes > 0, "invalid-shape", "buffer needs at least one lane");
    require(is_supported_block_width(block_width), "invalid-shape",
            "block width must be one of 1, 2, 4, 8, 16");
    return BlockedBuffer(lanes, block_width);
}

WorkPartition partition(std::size_t total, std::size_t workers, std::size_t block_width) {
    require(total >= 1, "invalid-shape", "partition needs at least one item");
    require(workers >= 1, "invalid-shape", "partition needs at least one worker");
    require(block_width >= 1, "invalid-shape", "partition needs a positive block width");

    WorkPartition out;
    out.total = total;
    out.workers = workers;
    out.ranges.reserve(workers);

    // distribute whole blocks; the remainder of blocks goes to the first
    // workers, the final (possibly short) block to whichever range covers it
    const std::size_t blocks = (total + block_width - 1) / block_width;
    const std::size_t base = blocks / workers;
    const std::size_t extra = blocks % workers;
    std::size_t begin_block = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t nblocks = base + (w < extra ? 1 : 0);
        const std::size_t begin = begin_block * block_width;
        std::size_t end = (begin_block + nblocks) * block_width;
        if (end > total) end = total;
        if (begin > total) {
            out.ranges.emplace_back(total, total);
        } else {
            out.ranges.emplace_back(begin, end);
        }
        begin_block += nblocks;
    }
    return out;
}

}  // namespace vexbayes
