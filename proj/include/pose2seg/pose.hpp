#pragma once

/// \file pose.hpp
/// \brief COCO 17-joint taxonomy, visibility encoding and left-right flip.

#include <array>
#include <cstddef>
#include <string_view>
#include <utility>

#include "pose2seg/geometry.hpp"

namespace pose2seg {

constexpr std::size_t kNumJoints = 17;
constexpr std::size_t kNumLimbs = 19;

enum class Joint : int {
    nose = 0,
    left_eye,
    right_eye,
    left_ear,
    right_ear,
    left_shoulder,
    right_shoulder,
    left_elbow,
    right_elbow,
    left_wrist,
    right_wrist,
    left_hip,
    right_hip,
    left_knee,
    right_knee,
    left_ankle,
    right_ankle,
};

struct KeypointSpec {
    int index;
    std::string_view name;
    int mirror_index; ///< Left/right counterpart; the nose maps to itself.
};

extern const std::array<KeypointSpec, kNumJoints> kKeypoints;

inline int mirror_index(int joint) { return kKeypoints[static_cast<std::size_t>(joint)].mirror_index; }

/// Limbs as (joint_a, joint_b), 0-based COCO skeleton order.
struct SkeletonSpec {
    std::array<std::pair<int, int>, kNumLimbs> limbs;
};

extern const SkeletonSpec kCocoSkeleton;

/// COCO annotation visibility flag.
enum class VisibilityCode : int { not_labeled = 0, labeled_hidden = 1, labeled_visible = 2 };

/// One joint as (x, y, v) with v in {0, 1, 2}. v == 0 always carries (0.5, 0.5).
struct EncodedKeypoint {
    double x = 0.5;
    double y = 0.5;
    int v = 0;

    bool valid() const { return v > 0; }
    Point2 point() const { return {x, y}; }
    friend bool operator==(const EncodedKeypoint&, const EncodedKeypoint&) = default;
};

struct CoordinateSpace {
    enum class Kind { pixel, unit_square };

    Kind kind = Kind::unit_square;
    double width = 1.0;
    double height = 1.0;

    static CoordinateSpace unit_square() { return {}; }
    static CoordinateSpace pixel(double width, double height) { return {Kind::pixel, width, height}; }

    bool contains(double x, double y) const { return x >= 0.0 && y >= 0.0 && x <= width && y <= height; }
    friend bool operator==(const CoordinateSpace&, const CoordinateSpace&) = default;
};

struct Pose {
    std::array<EncodedKeypoint, kNumJoints> keypoints{};
    CoordinateSpace space{};

    const EncodedKeypoint& operator[](std::size_t j) const { return keypoints[j]; }
    EncodedKeypoint& operator[](std::size_t j) { return keypoints[j]; }
    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Encodes a raw COCO triple. Throws Error(invalid_keypoint) for an unknown
/// visibility code or a labeled point outside `space`. Already-encoded
/// triples map to themselves.
EncodedKeypoint encode_keypoint(double x, double y, int visibility_code,
                                const CoordinateSpace& space = CoordinateSpace::unit_square());

/// Builds a pose from a flat COCO keypoint list [x0, y0, v0, x1, ...] of length 51.
Pose encode_pose(const std::array<double, 3 * kNumJoints>& raw, const CoordinateSpace& space);

int valid_count(const Pose& p);

/// Mirrors x about the centre of the pose's space and swaps left/right joint
/// channels. Invalid joints stay at (0.5, 0.5, 0).
Pose flip_pose(const Pose& p);

} // namespace pose2seg
