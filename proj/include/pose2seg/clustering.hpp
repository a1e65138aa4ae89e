#pragma once

/// \file clustering.hpp
/// \brief Pose normalization, pose distance and K-means pose templates.
///
/// Poses are compared as 17 stacked (x, y, v) vectors; the distance is the
/// plain sum of squared Euclidean norms, so the per-channel arithmetic mean
/// is the exact minimizer in the update step.

#include <array>
#include <cstdint>
#include <vector>

#include "pose2seg/geometry.hpp"
#include "pose2seg/pose.hpp"

namespace pose2seg {

constexpr int kMinTemplateJoints = 3;
constexpr int kMinClusteringJoints = 9; ///< "more than 8 valid points"

/// Maps a pixel-space pose into the unit square through the bbox's square RoI.
/// The RoI is the bbox grown along its shorter side to a square about the
/// bbox centre. Joints falling outside the RoI are encoded as not-in-image.
/// Throws Error(invalid_bbox) for a non-positive width or height.
Pose normalize_pose(const Pose& p, const Rect& bbox);

/// Sum over joints of the squared distance between (x, y, v) triples.
double pose_distance(const Pose& p, const Pose& q);

struct TemplateJoint {
    double x = 0.5;
    double y = 0.5;
    double v = 0.0; ///< real-valued cluster mean of the visibility channel
};

struct PoseTemplate {
    std::array<TemplateJoint, kNumJoints> mean{};
    std::array<bool, kNumJoints> valid_mask{};

    /// Recomputes valid_mask from mean (v > 0.5).
    static PoseTemplate from_mean(const std::array<TemplateJoint, kNumJoints>& mean);

    int valid_joints() const;
    bool usable() const { return valid_joints() >= kMinTemplateJoints; }
};

/// Distance between a pose and a real-valued cluster mean.
double pose_distance(const Pose& p, const PoseTemplate& t);

struct KMeansOptions {
    int k = 3;
    std::uint64_t seed = 0;
    int max_iter = 300;
};

struct ClusteringResult {
    std::vector<PoseTemplate> templates;
    std::vector<int> assignments;    ///< per pose that survived the validity filter
    std::vector<std::size_t> used;   ///< index into the input of each filtered pose
    std::vector<double> objective_history; ///< objective after each iteration
    std::vector<int> unusable_templates;   ///< templates with fewer than 3 valid joints
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Lloyd iterations with k-means++ seeding. Poses with at most 8 valid joints
/// are dropped first. Throws Error(insufficient_data) when fewer than k remain.
ClusteringResult kmeans_templates(const std::vector<Pose>& poses, const KMeansOptions& options);

/// Sum of distances of each pose to its assigned template mean.
double clustering_objective(const std::vector<Pose>& poses, const std::vector<PoseTemplate>& templates,
                            const std::vector<int>& assignments);

} // namespace pose2seg
