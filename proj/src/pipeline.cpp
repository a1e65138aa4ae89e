#include "pose2seg/pipeline.hpp"

#include <algorithm>

namespace pose2seg {

namespace {

InstanceSegmentation run_window(const Pose& pose, const Affine2D& matrix, int image_width, int image_height,
                                const PipelineOptions& options)
{
    InstanceSegmentation out;
    out.matrix = matrix;
    const Pose aligned = transform_pose(pose, matrix, options.size);
    out.features = skeleton_features(aligned, options.size, options.skeleton);
    out.window_mask = baseline_segment(out.features, options.baseline);
    out.mask = inverse_warp_mask(out.window_mask.plane(0), options.size, matrix, image_width, image_height,
                                 options.mask_threshold);
    return out;
}

} // namespace

InstanceSegmentation segment_with_pose(const Pose& pose, const std::vector<PoseTemplate>& bank, int image_width,
                                       int image_height, const PipelineOptions& options)
{
    Pose in_image = pose;
    in_image.space = CoordinateSpace::pixel(image_width, image_height);
    const AlignTransform t = select_template(in_image, bank, options.size);
    auto out = run_window(in_image, t.matrix, image_width, image_height, options);
    out.transform = t;
    return out;
}

Affine2D box_to_window(const Rect& box, int size)
{
    const double w = std::max(box.w, 1.0);
    const double h = std::max(box.h, 1.0);
    const double sx = size / w;
    const double sy = size / h;
    return {{sx, 0.0, -sx * box.x, 0.0, sy, -sy * box.y}};
}

InstanceSegmentation segment_with_box(const Pose& pose, double expand, int image_width, int image_height,
                                      const PipelineOptions& options)
{
    const Rect box = keypoints_to_bbox(pose, expand, image_width, image_height);
    return run_window(pose, box_to_window(box, options.size), image_width, image_height, options);
}

std::vector<Prediction> segment_dataset(const Dataset& dataset, const std::vector<PoseTemplate>& bank,
                                        const PipelineOptions& options, AlignMode mode, double expand)
{
    std::vector<Prediction> preds;
    for (const auto& inst : dataset.instances) {
        if (inst.iscrowd || !inst.keypoints || valid_count(*inst.keypoints) == 0)
            continue;
        const auto& image = dataset.image(inst.image_id);
        Prediction p;
        p.id = inst.id;
        p.image_id = inst.image_id;
        if (mode == AlignMode::pose) {
            auto seg = segment_with_pose(*inst.keypoints, bank, image.width, image.height, options);
            p.mask = std::move(seg.mask);
            p.score = seg.transform.score;
        }
        else {
            auto seg = segment_with_box(*inst.keypoints, expand, image.width, image.height, options);
            p.mask = std::move(seg.mask);
            p.score = 1.0;
        }
        preds.push_back(std::move(p));
    }
    return preds;
}

std::vector<SweepRow> box_alignment_sweep(const Dataset& dataset, const PipelineOptions& options,
                                          const EvalParams& params)
{
    std::vector<EvalGroundTruth> gts;
    for (const auto& inst : dataset.instances) {
        if (!inst.mask)
            continue;
        const auto& image = dataset.image(inst.image_id);
        gts.push_back({inst.id, inst.image_id, decode_mask(*inst.mask, image.width, image.height), inst.area,
                       inst.iscrowd});
    }
    std::vector<SweepRow> rows;
    for (double expand : bbox_expand_grid()) {
        const auto preds = segment_dataset(dataset, {}, options, AlignMode::keypoint_bbox, expand);
        rows.push_back({expand, average_precision(preds, gts, params)});
    }
    return rows;
}

} // namespace pose2seg
