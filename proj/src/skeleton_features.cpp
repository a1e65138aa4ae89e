#include "pose2seg/skeleton_features.hpp"

#include <algorithm>
#include <cmath>

namespace pose2seg {

namespace {

int clamp_index(double value, int size)
{
    return static_cast<int>(std::clamp(value, -1.0, static_cast<double>(size)));
}

void draw_confidence(const Pose& p, int size, double sigma, Image& out, int first_channel)
{
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (!p[j].valid())
            continue;
        const int c = first_channel + static_cast<int>(j);
        for (int v = 0; v < size; ++v) {
            const double dy = v - p[j].y;
            for (int u = 0; u < size; ++u) {
                const double dx = u - p[j].x;
                out.at(c, v, u) = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv_s2));
            }
        }
    }
}

void draw_pafs(const Pose& p, const SkeletonSpec& skeleton, int size, double width, Image& out, int first_channel)
{
    for (std::size_t l = 0; l < skeleton.limbs.size(); ++l) {
        const auto [ja, jb] = skeleton.limbs[l];
        const auto& a = p[static_cast<std::size_t>(ja)];
        const auto& b = p[static_cast<std::size_t>(jb)];
        if (!a.valid() || !b.valid())
            continue;
        const Point2 d = b.point() - a.point();
        const double length = std::sqrt(squared_norm(d));
        if (!(length > 0.0))
            continue;
        const Point2 dir = (1.0 / length) * d;
        // Pixels lying exactly on the support boundary must not depend on rounding.
        const double slack = 1e-9 * std::max(1.0, length);

        // Bounding box of the limb support, clipped to the window.
        const int u0 = std::max(0, clamp_index(std::floor(std::min(a.x, b.x) - width), size));
        const int u1 = std::min(size - 1, clamp_index(std::ceil(std::max(a.x, b.x) + width), size));
        const int v0 = std::max(0, clamp_index(std::floor(std::min(a.y, b.y) - width), size));
        const int v1 = std::min(size - 1, clamp_index(std::ceil(std::max(a.y, b.y) + width), size));

        const int cx = first_channel + 2 * static_cast<int>(l);
        for (int v = v0; v <= v1; ++v) {
            for (int u = u0; u <= u1; ++u) {
                const Point2 r = Point2{static_cast<double>(u), static_cast<double>(v)} - a.point();
                const double along = dot(r, dir);
                if (along < -slack || along > length + slack || std::abs(cross(dir, r)) > width + slack)
                    continue;
                out.at(cx, v, u) = static_cast<float>(dir.x);
                out.at(cx + 1, v, u) = static_cast<float>(dir.y);
            }
        }
    }
}

} // namespace

Image part_confidence_maps(const Pose& p, int size, double sigma)
{
    Image out(kConfidenceChannels, size, size);
    draw_confidence(p, size, sigma, out, 0);
    return out;
}

Image paf_maps(const Pose& p, const SkeletonSpec& skeleton, int size, double limb_width)
{
    Image out(kPafChannels, size, size);
    draw_pafs(p, skeleton, size, limb_width, out, 0);
    return out;
}

Image skeleton_features(const Pose& p, int size, const SkeletonOptions& options)
{
    Image out(kSkeletonChannels, size, size);
    draw_confidence(p, size, options.sigma_for(size), out, 0);
    draw_pafs(p, kCocoSkeleton, size, options.limb_width_for(size), out, kConfidenceChannels);
    return out;
}

} // namespace pose2seg
