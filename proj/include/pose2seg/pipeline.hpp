#pragma once

/// \file pipeline.hpp
/// \brief align -> skeleton -> segment -> inverse-align, per instance and per dataset.

#include <vector>

#include "pose2seg/affine_align.hpp"
#include "pose2seg/baseline.hpp"
#include "pose2seg/clustering.hpp"
#include "pose2seg/dataset.hpp"
#include "pose2seg/eval.hpp"
#include "pose2seg/skeleton_features.hpp"

namespace pose2seg {

struct PipelineOptions {
    int size = kDefaultAlignSize;
    SkeletonOptions skeleton;
    BaselineOptions baseline;
    double mask_threshold = 0.5;
};

enum class AlignMode {
    pose,           ///< template-fitted similarity
    keypoint_bbox,  ///< box from the valid joints, grown by `expand`, stretched onto the window
};

struct InstanceSegmentation {
    Affine2D matrix;         ///< image -> window
    AlignTransform transform; ///< filled in pose mode
    Image features;          ///< 55 x S x S
    Image window_mask;       ///< 1 x S x S
    Mask mask;               ///< image resolution
};

InstanceSegmentation segment_with_pose(const Pose& pose, const std::vector<PoseTemplate>& bank, int image_width,
                                       int image_height, const PipelineOptions& options = {});

/// Axis-aligned box -> S x S window (independent x and y scale).
Affine2D box_to_window(const Rect& box, int size);

InstanceSegmentation segment_with_box(const Pose& pose, double expand, int image_width, int image_height,
                                      const PipelineOptions& options = {});

/// One prediction per non-crowd instance that carries keypoints (at least
/// one valid joint). Prediction ids are the annotation ids; pose mode scores
/// with the alignment score, box mode with 1.
std::vector<Prediction> segment_dataset(const Dataset& dataset, const std::vector<PoseTemplate>& bank,
                                        const PipelineOptions& options = {}, AlignMode mode = AlignMode::pose,
                                        double expand = 0.0);

struct SweepRow {
    double expand = 0.0;
    ApReport report;
};

/// AP of the box-alignment variant at every factor of bbox_expand_grid().
std::vector<SweepRow> box_alignment_sweep(const Dataset& dataset, const PipelineOptions& options,
                                          const EvalParams& params);

} // namespace pose2seg
