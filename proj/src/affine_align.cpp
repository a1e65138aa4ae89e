#include "pose2seg/affine_align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pose2seg/error.hpp"

namespace pose2seg {

SimilarityFit estimate_similarity(std::span<const Point2> src, std::span<const Point2> dst)
{
    if (src.size() != dst.size())
        throw Error(ErrorCode::dimension_mismatch, "src and dst must have the same number of points");
    if (src.size() < 3)
        throw Error(ErrorCode::insufficient_data, "at least three correspondences are required");

    const double n = static_cast<double>(src.size());
    Point2 mu_src, mu_dst;
    for (std::size_t i = 0; i < src.size(); ++i) {
        mu_src = mu_src + src[i];
        mu_dst = mu_dst + dst[i];
    }
    mu_src = (1.0 / n) * mu_src;
    mu_dst = (1.0 / n) * mu_dst;

    double spread = 0.0;
    double magnitude = 0.0;
    double a = 0.0; // sum of dot(src_c, dst_c)
    double b = 0.0; // sum of cross(src_c, dst_c)
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Point2 p = src[i] - mu_src;
        const Point2 q = dst[i] - mu_dst;
        spread += squared_norm(p);
        magnitude = std::max(magnitude, squared_norm(src[i]));
        a += dot(p, q);
        b += cross(p, q);
    }
    if (!(spread > 1e-24 * n * std::max(1.0, magnitude)))
        throw Error(ErrorCode::degenerate_configuration, "source points are coincident");

    // s*cos(theta), s*sin(theta)
    const double c = a / spread;
    const double s = b / spread;
    const double tx = mu_dst.x - (c * mu_src.x - s * mu_src.y);
    const double ty = mu_dst.y - (s * mu_src.x + c * mu_src.y);

    SimilarityFit fit;
    fit.matrix = Affine2D{{c, -s, tx, s, c, ty}};
    for (std::size_t i = 0; i < src.size(); ++i)
        fit.residual += squared_norm(fit.matrix.apply(src[i]) - dst[i]);
    return fit;
}

namespace {

struct Candidate {
    Affine2D matrix;
    double residual;
};

// Fits joint j of the (optionally mirrored) pose to template joint j. The
// mirrored candidate reads source joint mirror(j) with x negated, so the final
// matrix is the fitted similarity composed with the reflection x -> -x.
std::optional<Candidate> fit_candidate(const Pose& p, const PoseTemplate& t, double size, bool mirrored)
{
    std::vector<Point2> src, dst;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const auto sj = mirrored ? static_cast<std::size_t>(mirror_index(static_cast<int>(j))) : j;
        if (!t.valid_mask[j] || !p[sj].valid())
            continue;
        src.push_back({mirrored ? -p[sj].x : p[sj].x, p[sj].y});
        dst.push_back({size * t.mean[j].x, size * t.mean[j].y});
    }
    if (src.size() < static_cast<std::size_t>(kMinTemplateJoints))
        return std::nullopt;

    SimilarityFit fit;
    try {
        fit = estimate_similarity(src, dst);
    }
    catch (const Error& e) {
        if (e.code() == ErrorCode::degenerate_configuration)
            return std::nullopt;
        throw;
    }
    const Affine2D reflect = mirrored ? Affine2D::scaling(-1.0, 1.0) : Affine2D::identity();
    return Candidate{fit.matrix.compose(reflect), fit.residual / (size * size)};
}

} // namespace

std::optional<AlignTransform> fit_to_template(const Pose& p, const PoseTemplate& t, int target_size)
{
    const double size = static_cast<double>(target_size);
    const auto direct = fit_candidate(p, t, size, false);
    const auto mirrored = fit_candidate(p, t, size, true);
    if (!direct && !mirrored)
        return std::nullopt;

    const bool use_mirror = !direct || (mirrored && mirrored->residual < direct->residual);
    const Candidate& best = use_mirror ? *mirrored : *direct;

    AlignTransform out;
    out.matrix = best.matrix;
    out.flipped = use_mirror;
    out.residual = best.residual;
    out.score = std::exp(-best.residual);
    return out;
}

AlignTransform whole_image_fallback(double image_width, double image_height, int target_size)
{
    if (!(image_width > 0.0) || !(image_height > 0.0) || target_size <= 0)
        throw Error(ErrorCode::invalid_bbox, "image and window sizes must be positive");

    const double side = std::max(image_width, image_height);
    const double scale = static_cast<double>(target_size) / side;
    AlignTransform out;
    out.matrix = Affine2D{{scale, 0.0, scale * 0.5 * (side - image_width), 0.0, scale,
                           scale * 0.5 * (side - image_height)}};
    out.fallback = true;
    return out;
}

AlignTransform select_template(const Pose& p, std::span<const PoseTemplate> bank, int target_size)
{
    if (bank.empty())
        throw Error(ErrorCode::insufficient_data, "template bank is empty");

    std::optional<AlignTransform> best;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        auto fit = fit_to_template(p, bank[i], target_size);
        if (!fit)
            continue;
        fit->template_index = static_cast<int>(i);
        if (!best || fit->score > best->score)
            best = *fit;
    }
    if (best)
        return *best;
    return whole_image_fallback(p.space.width, p.space.height, target_size);
}

Pose transform_pose(const Pose& p, const Affine2D& matrix, int target_size)
{
    Pose out;
    out.space = CoordinateSpace::pixel(target_size, target_size);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (!p[j].valid())
            continue;
        const Point2 q = matrix.apply(p[j].point());
        out[j] = {q.x, q.y, p[j].v};
    }
    return out;
}

float sample_bilinear(std::span<const float> plane, int height, int width, double x, double y)
{
    if (!(x > -1.0 && y > -1.0 && x < width && y < height))
        return 0.0F;
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = x - fx;
    const double ay = y - fy;

    auto px = [&](int yy, int xx) -> double {
        if (xx < 0 || yy < 0 || xx >= width || yy >= height)
            return 0.0;
        return plane[static_cast<std::size_t>(yy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(xx)];
    };
    const double top = (1.0 - ax) * px(y0, x0) + (ax != 0.0 ? ax * px(y0, x0 + 1) : 0.0);
    if (ay == 0.0)
        return static_cast<float>(top);
    const double bottom = (1.0 - ax) * px(y0 + 1, x0) + (ax != 0.0 ? ax * px(y0 + 1, x0 + 1) : 0.0);
    return static_cast<float>((1.0 - ay) * top + ay * bottom);
}

AlignedWindow warp_window(const Image& image, const AlignTransform& transform, int target_size, long long image_id)
{
    if (image.empty())
        throw Error(ErrorCode::dimension_mismatch, "cannot warp an empty image");
    const Affine2D inv = transform.matrix.inverse();

    AlignedWindow out;
    out.pixels = Image(image.channels(), target_size, target_size);
    out.transform = transform;
    out.image_id = image_id;
    for (int v = 0; v < target_size; ++v) {
        for (int u = 0; u < target_size; ++u) {
            const Point2 src = inv.apply({static_cast<double>(u), static_cast<double>(v)});
            for (int c = 0; c < image.channels(); ++c)
                out.pixels.at(c, v, u) = sample_bilinear(image.plane(c), image.height(), image.width(), src.x, src.y);
        }
    }
    return out;
}

Mask inverse_warp_mask(std::span<const float> window_mask, int window_size, const Affine2D& matrix, int image_width,
                       int image_height, double threshold)
{
    if (window_mask.size() != static_cast<std::size_t>(window_size) * static_cast<std::size_t>(window_size))
        throw Error(ErrorCode::dimension_mismatch, "window mask must be S x S");
    // Non-invertible transforms cannot be reversed.
    (void)matrix.inverse();

    Mask out(image_height, image_width);
    for (int y = 0; y < image_height; ++y) {
        for (int x = 0; x < image_width; ++x) {
            const Point2 q = matrix.apply({static_cast<double>(x), static_cast<double>(y)});
            const float value = sample_bilinear(window_mask, window_size, window_size, q.x, q.y);
            out.at(y, x) = (value > 0.0F && value >= threshold) ? 1 : 0;
        }
    }
    return out;
}

} // namespace pose2seg
