#pragma once

// A synthetic street scene: a few stick-figure people with silhouettes,
// keypoints and COCO annotations, small enough to run the whole pipeline.

#include <filesystem>
#include <vector>

#include "pose2seg/image_io.hpp"
#include "pose2seg/io.hpp"
#include "pose2seg/mask_codec.hpp"
#include "support.hpp"

namespace testing {

struct ScenePerson {
    Affine2D placement; ///< unit-square figure -> image pixels
    bool mirrored = false;
};

struct SyntheticScene {
    int width = 0;
    int height = 0;
    Image image;
    std::vector<Pose> poses;
    std::vector<Mask> silhouettes;
    Json annotations;
};

inline Pose placed_pose(const ScenePerson& person, int W, int H)
{
    Pose unit = make_pose(figure_points(), CoordinateSpace::unit_square(), all_valid());
    if (person.mirrored)
        unit = flip_pose(unit);
    Pose out;
    out.space = CoordinateSpace::pixel(W, H);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const Point2 q = person.placement.apply(unit[j].point());
        out[j] = {q.x, q.y, 2};
    }
    return out;
}

inline Mask silhouette_of(const Pose& p, double radius, int W, int H)
{
    Mask m(H, W);
    for (const auto& [a, b] : kCocoSkeleton.limbs)
        paint_segment(m, p[static_cast<std::size_t>(a)].point(), p[static_cast<std::size_t>(b)].point(), radius);
    return m;
}

inline std::vector<ScenePerson> default_people()
{
    return {
        {Affine2D{{70, 0, 10, 0, 70, 20}}, false},
        {Affine2D{{64, -6, 60, 6, 64, 30}}, true},
        {Affine2D{{50, 0, 120, 0, 50, 60}}, false},
    };
}

inline SyntheticScene make_scene(const std::vector<ScenePerson>& people = default_people(), int W = 180, int H = 120)
{
    SyntheticScene s;
    s.width = W;
    s.height = H;
    s.image = Image(3, H, W, 40.0F);
    Json anns = Json::array();
    long long id = 1;
    for (const auto& person : people) {
        const Pose pose = placed_pose(person, W, H);
        const double scale = std::sqrt(std::abs(person.placement.determinant()));
        const Mask sil = silhouette_of(pose, 0.075 * scale, W, H);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                if (sil.at(y, x) != 0)
                    for (int c = 0; c < 3; ++c)
                        s.image.at(c, y, x) = 80.0F + 50.0F * c + 10.0F * static_cast<float>(id);

        int x0 = W, y0 = H, x1 = -1, y1 = -1;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                if (sil.at(y, x) != 0) {
                    x0 = std::min(x0, x);
                    y0 = std::min(y0, y);
                    x1 = std::max(x1, x);
                    y1 = std::max(y1, y);
                }
        Json kp = Json::array();
        for (const auto& k : pose.keypoints) {
            kp.push_back(k.x);
            kp.push_back(k.y);
            kp.push_back(k.v);
        }
        const Rle rle = encode_rle(sil);
        anns.push_back({{"id", id},
                        {"image_id", 1},
                        {"category_id", 1},
                        {"iscrowd", 0},
                        {"area", sil.area()},
                        {"bbox", {x0, y0, x1 - x0 + 1, y1 - y0 + 1}},
                        {"keypoints", kp},
                        {"num_keypoints", kNumJoints},
                        {"segmentation", {{"size", {H, W}}, {"counts", rle_to_string(rle)}}}});
        s.poses.push_back(pose);
        s.silhouettes.push_back(sil);
        ++id;
    }
    s.annotations = {{"images", {{{"id", 1}, {"width", W}, {"height", H}, {"file_name", "scene.png"}}}},
                     {"annotations", anns},
                     {"categories", {{{"id", 1}, {"name", "person"}}}}};
    return s;
}

inline std::vector<PoseTemplate> figure_bank()
{
    return {make_template(figure_points(), all_valid())};
}

inline void write_scene(const SyntheticScene& s, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_image(dir / "scene.png", s.image);
    write_json_file(dir / "annotations.json", s.annotations);
    write_json_file(dir / "templates.json", template_bank_to_json(figure_bank()));
}

} // namespace testing
