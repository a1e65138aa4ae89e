#pragma once

// Shared fixtures for the test binaries.

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pose2seg/affine_align.hpp"
#include "pose2seg/clustering.hpp"
#include "pose2seg/geometry.hpp"
#include "pose2seg/pose.hpp"
#include "pose2seg/random.hpp"
#include "pose2seg/raster.hpp"

namespace testing {

using namespace pose2seg;

inline std::size_t J(Joint j) { return static_cast<std::size_t>(j); }

// Unit-square figure with the left arm raised, so it is not mirror symmetric.
inline std::array<Point2, kNumJoints> figure_points()
{
    return {{
        {0.50, 0.10}, {0.53, 0.08}, {0.47, 0.08}, {0.57, 0.10}, {0.43, 0.10},
        {0.62, 0.25}, {0.38, 0.25}, {0.72, 0.15}, {0.34, 0.40}, {0.78, 0.05},
        {0.33, 0.52}, {0.58, 0.55}, {0.42, 0.55}, {0.60, 0.73}, {0.41, 0.74},
        {0.61, 0.92}, {0.40, 0.93},
    }};
}

inline Pose make_pose(const std::array<Point2, kNumJoints>& pts, CoordinateSpace space,
                      const std::array<bool, kNumJoints>& valid)
{
    Pose p;
    p.space = space;
    for (std::size_t j = 0; j < kNumJoints; ++j)
        if (valid[j])
            p[j] = {pts[j].x, pts[j].y, 2};
    return p;
}

inline std::array<bool, kNumJoints> all_valid()
{
    std::array<bool, kNumJoints> v{};
    v.fill(true);
    return v;
}

inline PoseTemplate make_template(const std::array<Point2, kNumJoints>& pts, const std::array<bool, kNumJoints>& valid)
{
    std::array<TemplateJoint, kNumJoints> mean{};
    for (std::size_t j = 0; j < kNumJoints; ++j)
        mean[j] = valid[j] ? TemplateJoint{pts[j].x, pts[j].y, 2.0} : TemplateJoint{0.5, 0.5, 0.0};
    return PoseTemplate::from_mean(mean);
}

inline Affine2D similarity(double theta, double scale, double tx, double ty)
{
    const double c = scale * std::cos(theta);
    const double s = scale * std::sin(theta);
    return Affine2D{{c, -s, tx, s, c, ty}};
}

inline Affine2D random_similarity(Rng& rng, double smin = 0.25, double smax = 4.0, double tmax = 200.0)
{
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double scale = std::exp(rng.uniform(std::log(smin), std::log(smax)));
    return similarity(theta, scale, rng.uniform(-tmax, tmax), rng.uniform(-tmax, tmax));
}

inline std::vector<Point2> random_points(Rng& rng, std::size_t n, double extent = 100.0)
{
    std::vector<Point2> pts(n);
    for (auto& p : pts)
        p = {rng.uniform(-extent, extent), rng.uniform(-extent, extent)};
    return pts;
}

inline std::vector<Point2> apply_all(const Affine2D& m, const std::vector<Point2>& pts)
{
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts)
        out.push_back(m.apply(p));
    return out;
}

inline double max_entry_diff(const Affine2D& a, const Affine2D& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

// Paints every pixel whose centre lies within `radius` of segment a-b.
inline void paint_segment(Mask& mask, Point2 a, Point2 b, double radius)
{
    const Point2 ab = b - a;
    const double len2 = squared_norm(ab);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            const Point2 p{x + 0.5, y + 0.5};
            double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const Point2 q = a + t * ab;
            if (squared_norm(p - q) <= radius * radius)
                mask.at(y, x) = 1;
        }
}

inline Mask disk_mask(int h, int w, double cx, double cy, double r)
{
    Mask m(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                m.at(y, x) = 1;
    return m;
}

inline double iou(const Mask& a, const Mask& b)
{
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += (a.data()[i] && b.data()[i]) ? 1 : 0;
        uni += (a.data()[i] || b.data()[i]) ? 1 : 0;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace testing
