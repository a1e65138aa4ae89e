#pragma once

/// \file io.hpp
/// \brief JSON documents (COCO annotations, COCO results, template banks,
/// reports) and the binary feature tensor format.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "pose2seg/affine_align.hpp"
#include "pose2seg/clustering.hpp"
#include "pose2seg/dataset.hpp"
#include "pose2seg/eval.hpp"
#include "pose2seg/raster.hpp"

namespace pose2seg {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

/// Throws Error(io) when unreadable, Error(format) when not JSON.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// COCO annotation document -> person instances. Missing images /
/// annotations / categories arrays raise Error(format); annotations naming an
/// unknown image or category raise Error(reference). Malformed keypoints or
/// segmentations are recorded in Dataset::issues.
Dataset parse_annotations(const Json& doc);

/// Copy of `original` keeping only the images and annotations in `subset`.
Json subset_document(const Json& original, const Dataset& subset);

Json template_bank_to_json(const std::vector<PoseTemplate>& templates);
/// Throws Error(format) on schema violations.
std::vector<PoseTemplate> template_bank_from_json(const Json& doc);

Json transform_to_json(const AlignTransform& t);

/// COCO results list: [{image_id, segmentation: {size, counts}, score}].
/// Prediction ids follow list order.
std::vector<Prediction> parse_results(const Json& doc, const Dataset& gt);
Json results_to_json(const std::vector<Prediction>& preds);

/// Ground truth in evaluation form (segmentations decoded).
std::vector<EvalGroundTruth> ground_truth_for_eval(const Dataset& dataset);

Json stats_to_json(const OcclusionStats& stats);
Json ap_report_to_json(const ApReport& report);

/// Binary tensor: 8-byte magic "P2STNSR\x01", uint32 rank, uint32 dims[rank],
/// then float32 data in C order. All integers and floats little-endian.
void write_tensor(const std::filesystem::path& path, const Image& raster);
Image read_tensor(const std::filesystem::path& path);

} // namespace pose2seg
