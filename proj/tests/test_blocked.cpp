#include <doctest.h>

#include <cstdint>

#include "vexbayes/blocked.hpp"
#include "vexbayes/errors.hpp"

using namespace vexbayes;

TEST_CASE("create_buffer pads to whole blocks") {
    const auto a = create_buffer(10, 4);
    CHECK(a.lanes() == 10);
    CHECK(a.capacity() == 12);
    CHECK(a.padding() == 2);
    CHECK(a.blocks() == 3);

    const auto b = create_buffer(8, 8);
    CHECK(b.capacity() == 8);
    CHECK(b.padding() == 0);

    const auto c = create_buffer(1, 1);
    CHECK(c.capacity() == 1);
    CHECK(c.block_width() == 1);
}

TEST_CASE("buffers start zeroed and 64-byte aligned") {
    const auto buf = create_buffer(37, 8);
    CHECK(reinterpret_cast<std::uintptr_t>(buf.data()) % kBufferAlignment == 0);
    for (std::size_t i = 0; i < buf.capacity(); ++i) CHECK(buf[i] == 0.0);
}

TEST_CASE("create_buffer rejects bad shapes") {
    CHECK_THROWS_WITH_AS(create_buffer(0, 4), doctest::Contains("invalid-shape"), Error);
    CHECK_THROWS_WITH_AS(create_buffer(16, 3), doctest::Contains("invalid-shape"), Error);
    CHECK_THROWS_WITH_AS(create_buffer(16, 32), doctest::Contains("invalid-shape"), Error);
}

TEST_CASE("partition splits the paper-sized workload evenly") {
    const auto part = partition(8064, 16, 4);
    REQUIRE(part.ranges.size() == 16);
    std::size_t expected_begin = 0;
    for (const auto& [begin, end] : part.ranges) {
        CHECK(begin == expected_begin);
        CHECK(end - begin == 504);
        expected_begin = end;
    }
    CHECK(expected_begin == 8064);
}

TEST_CASE("partition sends the remainder to the first workers") {
    const auto part = partition(7, 2, 1);
    REQUIRE(part.ranges.size() == 2);
    CHECK(part.ranges[0] == std::pair<std::size_t, std::size_t>{0, 4});
    CHECK(part.ranges[1] == std::pair<std::size_t, std::size_t>{4, 7});
}

TEST_CASE("partition with one worker is the identity") {
    const auto part = partition(8, 1, 4);
    REQUIRE(part.ranges.size() == 1);
    CHECK(part.ranges[0] == std::pair<std::size_t, std::size_t>{0, 8});
}

TEST_CASE("partition properties: disjoint cover, aligned interior boundaries") {
    for (std::size_t n : {1u, 5u, 63u, 64u, 65u, 500u, 8064u}) {
        for (std::size_t p : {1u, 2u, 3u, 7u, 16u}) {
            for (std::size_t v : {1u, 4u, 8u}) {
                const auto part = partition(n, p, v);
                REQUIRE(part.ranges.size() == p);
                std::size_t cursor = 0;
                std::size_t largest = 0, smallest = n + v;
                for (const auto& [begin, end] : part.ranges) {
                    CHECK(begin == cursor);
                    CHECK(end >= begin);
                    if (end < n) CHECK(end % v == 0);
                    largest = std::max(largest, end - begin);
                    smallest = std::min(smallest, end - begin);
                    cursor = end;
                }
                CHECK(cursor == n);
                CHECK(largest - smallest <= v);
            }
        }
    }
}

TEST_CASE("partition is deterministic") {
    const auto a = partition(1001, 7, 8);
    const auto b = partition(1001, 7, 8);
    CHECK(a.ranges == b.ranges);
}
