#pragma once

/// \file affine_align.hpp
/// \brief Pose-driven alignment: similarity fitting against pose templates,
/// template selection by exp(-residual), and window warping.
///
/// The fitted transform has four continuous degrees of freedom (rotation,
/// uniform scale, translation) plus a binary left-right flip. The flip is
/// resolved by fitting both candidates. Residuals are reported in template
/// (unit-square) units, independent of the window size S.

#include <optional>
#include <span>
#include <vector>

#include "pose2seg/clustering.hpp"
#include "pose2seg/geometry.hpp"
#include "pose2seg/pose.hpp"
#include "pose2seg/raster.hpp"

namespace pose2seg {

constexpr int kDefaultAlignSize = 64;

struct SimilarityFit {
    Affine2D matrix;       ///< maps src onto dst
    double residual = 0.0; ///< sum of squared distances at the optimum
};

/// Closed-form least-squares similarity (rotation, uniform scale, translation).
/// Requires src.size() == dst.size() >= 3. Throws
/// Error(degenerate_configuration) when all source points coincide.
SimilarityFit estimate_similarity(std::span<const Point2> src, std::span<const Point2> dst);

struct AlignTransform {
    Affine2D matrix;       ///< source pixels -> aligned window pixels
    bool flipped = false;
    double residual = 0.0; ///< template units; 0 for the whole-image fallback
    double score = 0.0;    ///< exp(-residual), 0 for the whole-image fallback
    int template_index = -1; ///< -1 for the whole-image fallback
    bool fallback = false;
};

/// Both the direct and the mirrored candidate are fitted; the lower residual
/// wins (direct on ties). Returns nullopt when fewer than 3 joints are valid
/// in both the pose and the template.
std::optional<AlignTransform> fit_to_template(const Pose& p, const PoseTemplate& t, int target_size = kDefaultAlignSize);

/// Maps the centred square of side max(W, H) onto the S x S window.
AlignTransform whole_image_fallback(double image_width, double image_height, int target_size = kDefaultAlignSize);

/// Best-scoring template fit; the lowest template index wins ties. Falls back
/// to the whole image (sized from the pose's coordinate space) when no
/// template shares 3 joints with the pose.
AlignTransform select_template(const Pose& p, std::span<const PoseTemplate> bank, int target_size = kDefaultAlignSize);

/// Applies the transform to every valid joint. The result is expressed in the
/// S x S window frame; joints may fall outside the window.
Pose transform_pose(const Pose& p, const Affine2D& matrix, int target_size);

/// Bilinear sample at continuous (x, y), pixel centres at integer coordinates,
/// zero outside the raster.
float sample_bilinear(std::span<const float> plane, int height, int width, double x, double y);

struct AlignedWindow {
    Image pixels;
    AlignTransform transform;
    long long image_id = 0;
};

/// output(u, v) = image(H^-1 (u, v)), every channel. Throws
/// Error(singular_transform) for a non-invertible matrix.
AlignedWindow warp_window(const Image& image, const AlignTransform& transform, int target_size = kDefaultAlignSize,
                          long long image_id = 0);

/// Samples the window-space probability raster at H (x, y) for every image
/// pixel and thresholds (>= threshold is foreground).
Mask inverse_warp_mask(std::span<const float> window_mask, int window_size, const Affine2D& matrix, int image_width,
                       int image_height, double threshold = 0.5);

} // namespace pose2seg
