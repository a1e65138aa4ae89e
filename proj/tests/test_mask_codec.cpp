#include "doctest.h"

#include "pose2seg/error.hpp"
#include "pose2seg/mask_codec.hpp"
#include "support.hpp"

using namespace pose2seg;

TEST_CASE("toy uncompressed RLE is column major")
{
    const Mask m = decode_rle({4, 4, {4, 4, 8}});
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            CHECK(m.at(y, x) == (x == 1 ? 1 : 0));
    CHECK(encode_rle(m) == Rle{4, 4, {4, 4, 8}});
}

TEST_CASE("RLE of masks starting with foreground has a leading zero run")
{
    Mask m(2, 2, 1);
    m.at(1, 1) = 0;
    CHECK(encode_rle(m).counts == std::vector<std::uint32_t>{0, 3, 1});
    CHECK(encode_rle(Mask(3, 3)).counts == std::vector<std::uint32_t>{9});
    CHECK(encode_rle(Mask(0, 0)).counts == std::vector<std::uint32_t>{0});
}

TEST_CASE("run totals must cover the raster")
{
    CHECK_THROWS_AS(decode_rle({4, 4, {4, 4}}), Error);
    CHECK_THROWS_AS(decode_rle({4, 4, {4, 4, 9}}), Error);
    try {
        decode_rle({2, 2, {5}});
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::corrupt_mask);
    }
}

TEST_CASE("compressed strings decoded by hand")
{
    // 4 -> '4'; the third run is stored verbatim.
    CHECK(rle_to_string({4, 4, {4, 4, 8}}) == "448");
    // The fourth run is stored as 6 - 3 = 3.
    CHECK(rle_to_string({3, 5, {2, 3, 4, 6}}) == "2343");
    // 1 - 10 = -9: low five bits 10111 with the sign bit set, no continuation.
    CHECK(rle_to_string({3, 6, {5, 10, 2, 1}}) == "5:2G");
    // 100 = 3 * 32 + 4 needs a continuation group: (4 | 32) + 48 = 'T', then '3'.
    CHECK(rle_to_string({12, 12, {100, 44}}) == "T3\\1");

    CHECK(rle_from_string("5:2G", 3, 6) == Rle{3, 6, {5, 10, 2, 1}});
    CHECK(rle_from_string("T3\\1", 12, 12) == Rle{12, 12, {100, 44}});
}

TEST_CASE("malformed compressed strings are rejected")
{
    CHECK_THROWS_AS(rle_from_string("T", 12, 12), Error);   // dangling continuation
    CHECK_THROWS_AS(rle_from_string("448", 5, 5), Error);   // wrong total
    CHECK_THROWS_AS(rle_from_string("4\x01", 2, 2), Error); // out-of-range character
    CHECK_THROWS_AS(rle_from_string("2G", 1, 1), Error);    // negative run
}

TEST_CASE("random round trips through both RLE forms")
{
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const int h = 1 + static_cast<int>(rng.below(64)), w = 1 + static_cast<int>(rng.below(64));
        Mask m(h, w);
        const double p = rng.uniform();
        for (auto& v : m.data())
            v = rng.uniform() < p ? 1 : 0;
        const Rle rle = encode_rle(m);
        CHECK(decode_rle(rle) == m);
        CHECK(decode_rle(rle_from_string(rle_to_string(rle), h, w)) == m);
    }
}

TEST_CASE("polygon rasterization")
{
    const Mask full = rasterize_polygons({{0, 0, 8, 0, 8, 6, 0, 6}}, 8, 6);
    CHECK(full.area() == 48);

    // A 2x2 square covering pixels (1..2, 1..2).
    const Mask sq = rasterize_polygons({{1, 1, 3, 1, 3, 3, 1, 3}}, 5, 5);
    CHECK(sq.area() == 4);
    CHECK(sq.at(1, 1) == 1);
    CHECK(sq.at(2, 2) == 1);
    CHECK(sq.at(3, 3) == 0);

    // Two disjoint squares union.
    const Mask two = rasterize_polygons({{0, 0, 1, 0, 1, 1, 0, 1}, {3, 3, 4, 3, 4, 4, 3, 4}}, 5, 5);
    CHECK(two.area() == 2);

    // Right triangle below the diagonal: pixel centres with y + 0.5 > x + 0.5.
    const Mask tri = rasterize_polygons({{0, 0, 0, 10, 10, 10}}, 10, 10);
    std::size_t expected = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
            if (y > x) {
                ++expected;
                CHECK(tri.at(y, x) == 1);
            }
    CHECK(tri.area() >= expected);
    CHECK(tri.area() <= expected + 10);
}

TEST_CASE("decode_mask dispatches on the source form")
{
    const Rle rle{4, 4, {4, 4, 8}};
    const Mask m = decode_rle(rle);
    CHECK(decode_mask(rle, 4, 4) == m);
    CHECK(decode_mask(CompressedRle{4, 4, "448"}, 4, 4) == m);
    CHECK(decode_mask(Polygons{{1, 0, 2, 0, 2, 4, 1, 4}}, 4, 4) == m);
    CHECK_THROWS_AS(decode_mask(rle, 5, 4), Error);
}
