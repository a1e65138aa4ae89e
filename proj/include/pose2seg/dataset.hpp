#pragma once

/// \file dataset.hpp
/// \brief Person annotations, IoU primitives and MaxIoU occlusion analysis.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pose2seg/geometry.hpp"
#include "pose2seg/mask_codec.hpp"
#include "pose2seg/pose.hpp"
#include "pose2seg/raster.hpp"

namespace pose2seg {

struct ImageInfo {
    long long id = 0;
    int width = 0;
    int height = 0;
    std::string file_name;
};

struct InstanceAnnotation {
    long long id = 0;
    long long image_id = 0;
    Rect bbox;
    std::optional<Pose> keypoints; ///< pixel space of the owning image
    std::optional<MaskSource> mask;
    bool iscrowd = false;
    double area = 0.0;
};

/// A record that was kept with a repair or dropped, never silently.
struct ParseIssue {
    long long annotation_id = 0;
    std::string message;
};

struct Dataset {
    std::vector<ImageInfo> images;            ///< sorted by id
    std::vector<InstanceAnnotation> instances; ///< sorted by (image_id, id)
    std::vector<ParseIssue> issues;

    const ImageInfo& image(long long id) const;
    const ImageInfo* find_image(long long id) const;

    /// Instances grouped by image id, in id order.
    std::map<long long, std::vector<const InstanceAnnotation*>> by_image() const;
};

/// |a & b| / |a | b|, 0 for an empty union. Throws Error(dimension_mismatch).
double mask_iou(const Mask& a, const Mask& b);
double bbox_iou(const Rect& a, const Rect& b);

enum class Severity { none, moderate, hard };
enum class MaxIouMode { bbox, mask };

/// none below 0.5, moderate on [0.5, 0.75], hard above 0.75.
Severity classify_severity(double max_iou);
const char* to_string(Severity s);

struct OcclusionRecord {
    long long instance_id = 0;
    long long image_id = 0;
    double max_iou = 0.0;
    long long partner_id = -1; ///< -1 when the image holds no other person
    Severity severity = Severity::none;
};

struct OcclusionOptions {
    MaxIouMode mode = MaxIouMode::bbox;
    bool include_crowd = false;
};

/// MaxIoU of each instance of one image against the others. Crowd instances
/// take part only with include_crowd. Ties on the partner resolve to the
/// lowest id.
std::vector<OcclusionRecord> max_iou_records(const std::vector<const InstanceAnnotation*>& instances,
                                             const ImageInfo& image, const OcclusionOptions& options = {});

std::vector<OcclusionRecord> occlusion_records(const Dataset& dataset, const OcclusionOptions& options = {});

struct OcclusionStats {
    std::size_t images = 0;
    std::size_t persons = 0;
    std::size_t occluded_050 = 0; ///< MaxIoU > 0.5
    std::size_t occluded_075 = 0; ///< MaxIoU > 0.75
    double average_max_iou = 0.0;
};

OcclusionStats summarize(const std::vector<OcclusionRecord>& records);

/// Text table in the layout of the dataset comparison table: one column per
/// named dataset.
std::string format_stats_table(const std::vector<std::pair<std::string, OcclusionStats>>& columns);

struct FilterResult {
    Dataset subset;
    OcclusionStats input_stats;
    OcclusionStats subset_stats;
    std::vector<OcclusionRecord> records;
};

/// Keeps instances with MaxIoU > threshold; images without survivors are dropped.
FilterResult filter_occluded(const Dataset& dataset, double threshold, const OcclusionOptions& options = {});

/// Restricts a dataset to the given images.
Dataset subset_images(const Dataset& dataset, const std::vector<long long>& image_ids);

struct Split {
    Dataset val;
    Dataset test;
};

/// Seeded image-level shuffle; round(val_fraction * #images) images go to val.
Split split_dataset(const Dataset& dataset, std::uint64_t seed, double val_fraction);

/// Replays a published split. Images listed in neither set are dropped;
/// ids absent from the dataset raise Error(reference).
Split split_from_manifest(const Dataset& dataset, const std::vector<long long>& val_ids,
                          const std::vector<long long>& test_ids);

} // namespace pose2seg
