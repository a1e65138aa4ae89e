#include "pose2seg/mask_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pose2seg/error.hpp"

namespace pose2seg {

Rle encode_rle(const Mask& mask)
{
    Rle rle;
    rle.height = mask.height();
    rle.width = mask.width();
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (int x = 0; x < mask.width(); ++x) {
        for (int y = 0; y < mask.height(); ++y) {
            const std::uint8_t v = mask.at(y, x) != 0 ? 1 : 0;
            if (v != current) {
                rle.counts.push_back(run);
                run = 0;
                current = v;
            }
            ++run;
        }
    }
    rle.counts.push_back(run);
    return rle;
}

Mask decode_rle(const Rle& rle)
{
    if (rle.height < 0 || rle.width < 0)
        throw Error(ErrorCode::corrupt_mask, "negative RLE size");
    const std::uint64_t total = static_cast<std::uint64_t>(rle.height) * static_cast<std::uint64_t>(rle.width);
    std::uint64_t sum = 0;
    for (auto c : rle.counts)
        sum += c;
    if (sum != total)
        throw Error(ErrorCode::corrupt_mask, "RLE counts sum to " + std::to_string(sum) + ", expected " +
                                                 std::to_string(total));

    Mask mask(rle.height, rle.width);
    std::uint64_t pos = 0;
    std::uint8_t value = 0;
    const auto h = static_cast<std::uint64_t>(rle.height);
    for (auto c : rle.counts) {
        if (value != 0) {
            for (std::uint64_t i = pos; i < pos + c; ++i)
                mask.at(static_cast<int>(i % h), static_cast<int>(i / h)) = 1;
        }
        pos += c;
        value ^= 1;
    }
    return mask;
}

std::string rle_to_string(const Rle& rle)
{
    std::string s;
    for (std::size_t i = 0; i < rle.counts.size(); ++i) {
        long long x = static_cast<long long>(rle.counts[i]);
        if (i > 2)
            x -= static_cast<long long>(rle.counts[i - 2]);
        bool more = true;
        while (more) {
            char c = static_cast<char>(x & 0x1f);
            x >>= 5;
            more = (c & 0x10) ? x != -1 : x != 0;
            if (more)
                c |= 0x20;
            s.push_back(static_cast<char>(c + 48));
        }
    }
    return s;
}

Rle rle_from_string(std::string_view counts, int height, int width)
{
    Rle rle;
    rle.height = height;
    rle.width = width;
    std::size_t p = 0;
    while (p < counts.size()) {
        long long x = 0;
        int k = 0;
        bool more = true;
        while (more) {
            if (p >= counts.size())
                throw Error(ErrorCode::corrupt_mask, "truncated compressed RLE");
            const int c = static_cast<int>(counts[p]) - 48;
            if (c < 0 || c > 63)
                throw Error(ErrorCode::corrupt_mask, "invalid character in compressed RLE");
            if (k >= 12)
                throw Error(ErrorCode::corrupt_mask, "compressed RLE run is too long");
            x |= static_cast<long long>(c & 0x1f) << (5 * k);
            more = (c & 0x20) != 0;
            ++p;
            ++k;
            if (!more && (c & 0x10))
                x |= -1LL << (5 * k);
        }
        if (rle.counts.size() > 2)
            x += static_cast<long long>(rle.counts[rle.counts.size() - 2]);
        if (x < 0 || x > static_cast<long long>(UINT32_MAX))
            throw Error(ErrorCode::corrupt_mask, "compressed RLE decodes to an invalid run length");
        rle.counts.push_back(static_cast<std::uint32_t>(x));
    }
    std::uint64_t total = 0;
    for (auto c : rle.counts)
        total += c;
    if (total != static_cast<std::uint64_t>(height) * static_cast<std::uint64_t>(width))
        throw Error(ErrorCode::corrupt_mask, "compressed RLE covers " + std::to_string(total) + " pixels, expected " +
                                                 std::to_string(static_cast<long long>(height) * width));
    return rle;
}

Mask rasterize_polygons(const Polygons& polygons, int width, int height)
{
    Mask mask(height, width);
    std::vector<double> crossings;
    for (const auto& poly : polygons) {
        if (poly.size() % 2 != 0)
            throw Error(ErrorCode::format, "polygon has an odd number of coordinates");
        const std::size_t n = poly.size() / 2;
        if (n < 3)
            continue;
        for (int y = 0; y < height; ++y) {
            const double yc = y + 0.5;
            crossings.clear();
            for (std::size_t i = 0; i < n; ++i) {
                const double x1 = poly[2 * i], y1 = poly[2 * i + 1];
                const double x2 = poly[2 * ((i + 1) % n)], y2 = poly[2 * ((i + 1) % n) + 1];
                if ((y1 <= yc) != (y2 <= yc))
                    crossings.push_back(x1 + (yc - y1) * (x2 - x1) / (y2 - y1));
            }
            std::sort(crossings.begin(), crossings.end());
            for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
                // pixel centres xc with crossings[i] <= xc < crossings[i+1]
                const double lo = std::ceil(crossings[i] - 0.5);
                const double hi = std::ceil(crossings[i + 1] - 0.5);
                const int x0 = static_cast<int>(std::clamp(lo, 0.0, static_cast<double>(width)));
                const int x1 = static_cast<int>(std::clamp(hi, 0.0, static_cast<double>(width)));
                for (int x = x0; x < x1; ++x)
                    mask.at(y, x) = 1;
            }
        }
    }
    return mask;
}

Mask decode_mask(const MaskSource& source, int width, int height)
{
    if (width <= 0 || height <= 0)
        throw Error(ErrorCode::dimension_mismatch, "mask dimensions must be positive");

    auto check = [&](int h, int w) {
        if (h != height || w != width)
            throw Error(ErrorCode::dimension_mismatch, "RLE size " + std::to_string(w) + "x" + std::to_string(h) +
                                                           " does not match image " + std::to_string(width) + "x" +
                                                           std::to_string(height));
    };
    if (const auto* polys = std::get_if<Polygons>(&source))
        return rasterize_polygons(*polys, width, height);
    if (const auto* rle = std::get_if<Rle>(&source)) {
        check(rle->height, rle->width);
        return decode_rle(*rle);
    }
    const auto& compressed = std::get<CompressedRle>(source);
    check(compressed.height, compressed.width);
    return decode_rle(rle_from_string(compressed.counts, compressed.height, compressed.width));
}

} // namespace pose2seg
