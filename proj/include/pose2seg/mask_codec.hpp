#pragma once

/// \file mask_codec.hpp
/// \brief COCO mask interchange: column-major run-length encoding, the
/// compressed RLE string form, and polygon rasterization.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pose2seg/raster.hpp"

namespace pose2seg {

/// Uncompressed RLE. Runs alternate 0, 1, 0, ... starting with zeros, over
/// pixels in column-major order.
struct Rle {
    int height = 0;
    int width = 0;
    std::vector<std::uint32_t> counts;

    friend bool operator==(const Rle&, const Rle&) = default;
};

struct CompressedRle {
    int height = 0;
    int width = 0;
    std::string counts;
};

/// Each polygon is a flat [x0, y0, x1, y1, ...] list in continuous pixel
/// coordinates.
using Polygons = std::vector<std::vector<double>>;

using MaskSource = std::variant<Polygons, Rle, CompressedRle>;

Rle encode_rle(const Mask& mask);

/// Throws Error(corrupt_mask) when the runs do not cover height * width pixels.
Mask decode_rle(const Rle& rle);

/// COCO 6-bit varint string; runs past the third are stored as differences
/// from the run two positions earlier.
std::string rle_to_string(const Rle& rle);
Rle rle_from_string(std::string_view counts, int height, int width);

/// Even-odd fill sampled at pixel centres (x + 0.5, y + 0.5); multiple
/// polygons are unioned.
Mask rasterize_polygons(const Polygons& polygons, int width, int height);

/// Throws Error(dimension_mismatch) if an RLE's size differs from (width, height).
Mask decode_mask(const MaskSource& source, int width, int height);

} // namespace pose2seg
