#pragma once

#include <filesystem>

#include "pose2seg/raster.hpp"

namespace pose2seg {

/// 8-bit image file -> planar float raster in [0, 255], channels as stored (BGR for colour).
Image read_image(const std::filesystem::path& path);

/// Values clamped to [0, 255]. 1 or 3 channels.
void write_image(const std::filesystem::path& path, const Image& image);

/// Single channel, `lo` maps to black and `hi` to white.
void write_channel_preview(const std::filesystem::path& path, const Image& raster, int channel, float lo, float hi);

} // namespace pose2seg
