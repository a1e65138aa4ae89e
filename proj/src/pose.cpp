#include "pose2seg/pose.hpp"

#include <string>

#include "pose2seg/error.hpp"

namespace pose2seg {

const std::array<KeypointSpec, kNumJoints> kKeypoints{{
    {0, "nose", 0},
    {1, "left_eye", 2},
    {2, "right_eye", 1},
    {3, "left_ear", 4},
    {4, "right_ear", 3},
    {5, "left_shoulder", 6},
    {6, "right_shoulder", 5},
    {7, "left_elbow", 8},
    {8, "right_elbow", 7},
    {9, "left_wrist", 10},
    {10, "right_wrist", 9},
    {11, "left_hip", 12},
    {12, "right_hip", 11},
    {13, "left_knee", 14},
    {14, "right_knee", 13},
    {15, "left_ankle", 16},
    {16, "right_ankle", 15},
}};

// COCO person skeleton, converted to 0-based indices.
const SkeletonSpec kCocoSkeleton{{{
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6}, {5, 7}, {6, 8},
    {7, 9}, {8, 10}, {1, 2}, {0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 6},
}}};

EncodedKeypoint encode_keypoint(double x, double y, int visibility_code, const CoordinateSpace& space)
{
    switch (visibility_code) {
    case static_cast<int>(VisibilityCode::not_labeled):
        return {};
    case static_cast<int>(VisibilityCode::labeled_hidden):
    case static_cast<int>(VisibilityCode::labeled_visible):
        if (!std::isfinite(x) || !std::isfinite(y) || !space.contains(x, y))
            throw Error(ErrorCode::invalid_keypoint,
                        "keypoint (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside its coordinate space");
        return {x, y, visibility_code};
    default:
        throw Error(ErrorCode::invalid_keypoint, "visibility code must be 0, 1 or 2, got " + std::to_string(visibility_code));
    }
}

Pose encode_pose(const std::array<double, 3 * kNumJoints>& raw, const CoordinateSpace& space)
{
    Pose p;
    p.space = space;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const double v = raw[3 * j + 2];
        if (v != std::floor(v))
            throw Error(ErrorCode::invalid_keypoint, "non-integer visibility code for joint " + std::to_string(j));
        p[j] = encode_keypoint(raw[3 * j], raw[3 * j + 1], static_cast<int>(v), space);
    }
    return p;
}

int valid_count(const Pose& p)
{
    int n = 0;
    for (const auto& k : p.keypoints)
        n += k.valid() ? 1 : 0;
    return n;
}

Pose flip_pose(const Pose& p)
{
    Pose out;
    out.space = p.space;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const auto& src = p[static_cast<std::size_t>(mirror_index(static_cast<int>(j)))];
        if (src.valid())
            out[j] = {p.space.width - src.x, src.y, src.v};
    }
    return out;
}

} // namespace pose2seg
