#pragma once

/// \file eval.hpp
/// \brief COCO-style mask AP with size and occlusion bins, and the
/// keypoint-to-box expansion used by the box-alignment ablation.
///
/// Matching is greedy in descending score order (ties by prediction id); each
/// prediction takes the unmatched gt with the highest IoU at or above the
/// threshold (ties by gt id). Precision is interpolated on 101 recall points.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pose2seg/dataset.hpp"
#include "pose2seg/geometry.hpp"
#include "pose2seg/pose.hpp"
#include "pose2seg/raster.hpp"

namespace pose2seg {

struct Prediction {
    long long id = 0;
    long long image_id = 0;
    Mask mask;
    double score = 0.0;
};

struct EvalGroundTruth {
    long long id = 0;
    long long image_id = 0;
    Mask mask;
    double area = 0.0;
    bool iscrowd = false;
};

/// Result of matching within one image at one IoU threshold.
struct Matching {
    std::vector<long long> pred_ids;    ///< in match order (score desc, id asc)
    std::vector<long long> matched_gt;  ///< per entry of pred_ids, -1 when unmatched
    std::vector<double> matched_iou;
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
};

/// Greedy one-to-one matching for a single image (crowd gts are not used).
Matching match_instances(const std::vector<Prediction>& preds, const std::vector<EvalGroundTruth>& gts,
                         double iou_threshold);

struct EvalBin {
    std::string name;
    std::function<bool(const EvalGroundTruth&)> contains; ///< gts outside the bin are ignored
    /// Unmatched predictions whose area falls outside [lo, hi] are ignored,
    /// as COCO does for area ranges. Bins without a range count them as FP.
    std::optional<std::pair<double, double>> area_range;
};

constexpr double kSmallAreaLimit = 32.0 * 32.0;
constexpr double kMediumAreaLimit = 96.0 * 96.0;

/// all / medium [32^2, 96^2] / large (96^2, inf)
std::vector<EvalBin> size_bins();

/// all / moderate / hard, keyed on gt instance id.
std::vector<EvalBin> occlusion_bins(const std::vector<OcclusionRecord>& records);

/// 0.50:0.05:0.95
std::vector<double> coco_iou_thresholds();

/// 0:0.01:1
std::vector<double> coco_recall_thresholds();

struct EvalParams {
    std::vector<double> iou_thresholds = coco_iou_thresholds();
    std::vector<EvalBin> bins = size_bins();
    int max_dets = 100;         ///< per image
    bool exclude_small = false; ///< ignore gts (and unmatched predictions) with area < 32^2
};

struct BinReport {
    std::string name;
    std::optional<double> ap; ///< nullopt when the bin holds no gts
    std::vector<std::optional<double>> ap_per_threshold;
    std::vector<std::vector<double>> precision; ///< [threshold][recall point]
    std::vector<double> max_recall;             ///< per threshold
    std::size_t gt_count = 0;
    std::vector<int> true_positives;  ///< per threshold
    std::vector<int> false_negatives; ///< per threshold
};

struct ApReport {
    std::vector<double> iou_thresholds;
    std::vector<BinReport> bins;

    const BinReport& bin(const std::string& name) const;
    /// AP of the first bin. Throws Error(undefined_ap) when it has no gts.
    double overall() const;
};

ApReport average_precision(const std::vector<Prediction>& preds, const std::vector<EvalGroundTruth>& gts,
                           const EvalParams& params = {});

/// Text table with one column per bin.
std::string format_ap_table(const std::string& method, const ApReport& report);

/// Tight box over the valid joints, grown by `expand` * (w, h) about its
/// centre and clamped to the image. Throws Error(insufficient_data) without
/// valid joints.
Rect keypoints_to_bbox(const Pose& p, double expand, double image_width, double image_height);

/// Expansion factors of the box-alignment sweep: 30% to 100% in 10% steps.
std::vector<double> bbox_expand_grid();

} // namespace pose2seg
