#pragma once

/// \file skeleton_features.hpp
/// \brief Per-instance skeleton rasters: 17 part confidence maps followed by
/// 19 two-channel part affinity fields, 55 channels in total.
///
/// Channel layout: [0, 17) confidence in joint order, then (x, y) pairs per
/// limb in kCocoSkeleton order. Pixel centres sit at integer coordinates.

#include "pose2seg/pose.hpp"
#include "pose2seg/raster.hpp"

namespace pose2seg {

constexpr int kConfidenceChannels = static_cast<int>(kNumJoints);
constexpr int kPafChannels = 2 * static_cast<int>(kNumLimbs);
constexpr int kSkeletonChannels = kConfidenceChannels + kPafChannels;

struct SkeletonOptions {
    double sigma = 0.0;      ///< <= 0 selects 0.06 * S
    double limb_width = 0.0; ///< <= 0 selects 0.03 * S

    double sigma_for(int size) const { return sigma > 0.0 ? sigma : 0.06 * size; }
    double limb_width_for(int size) const { return limb_width > 0.0 ? limb_width : 0.03 * size; }
};

/// exp(-|(u, v) - joint|^2 / sigma^2) per valid joint, zero for invalid joints.
Image part_confidence_maps(const Pose& p, int size, double sigma);

/// Unit limb direction on every pixel within limb_width of the segment
/// (perpendicular distance, longitudinal extent clamped to the segment).
Image paf_maps(const Pose& p, const SkeletonSpec& skeleton, int size, double limb_width);

/// Concatenation of part_confidence_maps and paf_maps.
Image skeleton_features(const Pose& p, int size, const SkeletonOptions& options = {});

} // namespace pose2seg
