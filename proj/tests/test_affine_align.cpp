#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pose2seg/affine_align.hpp"
#include "pose2seg/error.hpp"
#include "support.hpp"

using namespace pose2seg;
using namespace testing;

namespace {

Pose pose_under(const Affine2D& m, const std::array<Point2, kNumJoints>& unit_pts, double scale_to_px,
                std::array<bool, kNumJoints> valid, double W = 1e4, double H = 1e4)
{
    std::array<Point2, kNumJoints> pts{};
    for (std::size_t j = 0; j < kNumJoints; ++j)
        pts[j] = m.apply(scale_to_px * unit_pts[j]);
    return make_pose(pts, CoordinateSpace::pixel(W, H), valid);
}

// Exact residual of a given similarity (t fitted by centroids) for a grid search.
double residual_for(double theta, double s, const std::vector<Point2>& src, const std::vector<Point2>& dst)
{
    Point2 ms{0, 0}, md{0, 0};
    for (std::size_t i = 0; i < src.size(); ++i) {
        ms = ms + (1.0 / src.size()) * src[i];
        md = md + (1.0 / src.size()) * dst[i];
    }
    const double c = s * std::cos(theta), sn = s * std::sin(theta);
    double r = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Point2 p = src[i] - ms;
        const Point2 q{c * p.x - sn * p.y + md.x, sn * p.x + c * p.y + md.y};
        r += squared_norm(q - dst[i]);
    }
    return r;
}

} // namespace

TEST_CASE("identical point sets give the identity")
{
    const std::vector<Point2> pts{{0, 0}, {3, 1}, {1, 4}};
    const auto fit = estimate_similarity(pts, pts);
    CHECK(max_entry_diff(fit.matrix, Affine2D::identity()) < 1e-12);
    CHECK(fit.residual < 1e-20);
}

TEST_CASE("a 90 degree, x2 relation is inverted")
{
    const std::vector<Point2> dst{{0, 0}, {3, 1}, {1, 4}, {-2, 2}};
    const Affine2D forward = similarity(std::numbers::pi / 2, 2.0, 5.0, -3.0);
    const auto src = apply_all(forward, dst);
    const auto fit = estimate_similarity(src, dst);
    const Affine2D expected = similarity(-std::numbers::pi / 2, 0.5, 0, 0);
    CHECK(fit.matrix(0, 0) == doctest::Approx(expected(0, 0)).epsilon(1e-9));
    CHECK(fit.matrix(0, 1) == doctest::Approx(expected(0, 1)));
    CHECK(fit.matrix(1, 0) == doctest::Approx(expected(1, 0)));
    CHECK(fit.residual < 1e-9);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const Point2 q = fit.matrix.apply(src[i]);
        CHECK(q.x == doctest::Approx(dst[i].x).epsilon(1e-9));
        CHECK(q.y == doctest::Approx(dst[i].y).epsilon(1e-9));
    }
}

TEST_CASE("estimate_similarity argument errors")
{
    const std::vector<Point2> three{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<Point2> two{{0, 0}, {1, 0}};
    const std::vector<Point2> same{{2, 2}, {2, 2}, {2, 2}};
    CHECK_THROWS_AS(estimate_similarity(two, two), Error);
    CHECK_THROWS_AS(estimate_similarity(three, two), Error);
    try {
        estimate_similarity(same, three);
        FAIL("expected an error");
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_configuration);
    }
}

TEST_CASE("noisy fits are no worse than a coarse grid search")
{
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        auto src = random_points(rng, 8);
        auto dst = apply_all(random_similarity(rng), src);
        for (auto& p : dst)
            p = p + Point2{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const auto fit = estimate_similarity(src, dst);
        double best = 1e300;
        for (int i = 0; i < 628; ++i)
            for (double s = 0.2; s < 5; s *= 1.05)
                best = std::min(best, residual_for(i * 0.01, s, src, dst));
        CHECK(fit.residual <= best + 1e-9 * best);
        // Direct evaluation agrees with the reported residual.
        double direct = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i)
            direct += squared_norm(fit.matrix.apply(src[i]) - dst[i]);
        CHECK(fit.residual == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("fit_to_template on an exact similarity copy")
{
    const auto pts = figure_points();
    const auto tmpl = make_template(pts, all_valid());
    Rng rng(5);
    const Affine2D m = random_similarity(rng, 0.5, 2.0, 50.0);
    const Pose p = pose_under(m, pts, 100.0, all_valid());
    const auto t = fit_to_template(p, tmpl, 64);
    REQUIRE(t);
    CHECK_FALSE(t->flipped);
    CHECK(t->residual < 1e-18);
    CHECK(t->score == doctest::Approx(1.0));
    CHECK(t->matrix.determinant() > 0);
    const Point2 q = t->matrix.apply(p[0].point());
    CHECK(q.x == doctest::Approx(64 * pts[0].x));
    CHECK(q.y == doctest::Approx(64 * pts[0].y));
}

TEST_CASE("fit_to_template detects a mirrored pose")
{
    const auto pts = figure_points();
    const auto tmpl = make_template(pts, all_valid());
    const Pose p = flip_pose(pose_under(similarity(0.3, 1.5, 400, 300), pts, 100.0, all_valid(), 1000, 1000));
    const auto t = fit_to_template(p, tmpl, 64);
    REQUIRE(t);
    CHECK(t->flipped);
    CHECK(t->residual < 1e-18);
    CHECK(t->matrix.determinant() < 0);
    // Right-eye channel of the flipped pose is the template's left eye.
    const Point2 q = t->matrix.apply(p[J(Joint::right_eye)].point());
    CHECK(q.x == doctest::Approx(64 * pts[J(Joint::left_eye)].x));
    CHECK(q.y == doctest::Approx(64 * pts[J(Joint::left_eye)].y));
}

TEST_CASE("fewer than three shared joints yields no fit")
{
    std::array<bool, kNumJoints> two{};
    two[0] = two[5] = true;
    const Pose p = make_pose(figure_points(), CoordinateSpace::pixel(1, 1), two);
    CHECK_FALSE(fit_to_template(p, make_template(figure_points(), all_valid()), 64));
}

TEST_CASE("select_template picks the exact match and breaks ties towards the lowest index")
{
    auto pts = figure_points();
    std::vector<PoseTemplate> bank;
    for (int i = 0; i < 3; ++i) {
        auto shifted = pts;
        for (std::size_t j = 0; j < kNumJoints; ++j)
            shifted[j].y = std::min(0.99, pts[j].y * (1.0 + 0.15 * i * (j % 3 == 0)));
        bank.push_back(make_template(shifted, all_valid()));
    }
    std::array<Point2, kNumJoints> exact{};
    for (std::size_t j = 0; j < kNumJoints; ++j)
        exact[j] = {bank[2].mean[j].x, bank[2].mean[j].y};
    const Pose p = pose_under(similarity(0.1, 2.0, 30, 40), exact, 50.0, all_valid());
    const auto t = select_template(p, bank, 64);
    CHECK(t.template_index == 2);
    CHECK(t.score == doctest::Approx(1.0));

    std::vector<PoseTemplate> twins{bank[1], bank[1]};
    const auto tie = select_template(pose_under(similarity(0, 1, 0, 0), pts, 50.0, all_valid()), twins, 64);
    CHECK(tie.template_index == 0);
}

TEST_CASE("a single valid joint falls back to the whole image")
{
    std::array<bool, kNumJoints> one{};
    one[0] = true;
    Pose p = make_pose(figure_points(), CoordinateSpace::pixel(200, 100), one);
    const auto t = select_template(p, std::vector<PoseTemplate>{make_template(figure_points(), all_valid())}, 64);
    CHECK(t.fallback);
    CHECK(t.template_index == -1);
    CHECK(t.score == 0.0);
    CHECK(t.matrix(0, 0) == doctest::Approx(0.32));
    CHECK(t.matrix(1, 2) == doctest::Approx(16.0));
}

TEST_CASE("whole-image fallback examples")
{
    CHECK(max_entry_diff(whole_image_fallback(64, 64, 64).matrix, Affine2D::identity()) < 1e-15);
    CHECK(max_entry_diff(whole_image_fallback(128, 128, 64).matrix, Affine2D::scaling(0.5, 0.5)) < 1e-15);
    const auto m = whole_image_fallback(200, 100, 64).matrix;
    CHECK(m(0, 0) == doctest::Approx(64.0 / 200));
    CHECK(m(1, 1) == doctest::Approx(64.0 / 200));
    CHECK(m(0, 1) == 0.0);
    CHECK(m(0, 2) == doctest::Approx(0.0));
    CHECK(m(1, 2) == doctest::Approx(0.32 * 50));
    // The strip's centre maps to the window centre.
    const Point2 c = m.apply({100, 50});
    CHECK(c.x == doctest::Approx(32));
    CHECK(c.y == doctest::Approx(32));
}

TEST_CASE("identity warp reproduces the image and a translation shifts it")
{
    Image img(2, 64, 64);
    Rng rng(1);
    for (auto& v : img.data())
        v = static_cast<float>(rng.uniform());
    AlignTransform t;
    const auto same = warp_window(img, t, 64);
    CHECK(same.pixels == img);

    t.matrix = Affine2D::translation(10, 0);
    const auto shifted = warp_window(img, t, 64);
    for (int c = 0; c < 2; ++c)
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                if (x < 10)
                    CHECK(shifted.pixels.at(c, y, x) == 0.0F);
                else
                    CHECK(shifted.pixels.at(c, y, x) == img.at(c, y, x - 10));
            }
}

TEST_CASE("singular transforms are rejected")
{
    AlignTransform t;
    t.matrix = Affine2D::scaling(0, 1);
    CHECK_THROWS_AS(warp_window(Image(1, 8, 8), t, 8), Error);
    std::vector<float> win(64, 1.0F);
    CHECK_THROWS_AS(inverse_warp_mask(win, 8, t.matrix, 8, 8), Error);
}

TEST_CASE("inverse_warp_mask basics")
{
    const Mask disk = disk_mask(32, 32, 15, 16, 9);
    std::vector<float> win(disk.data().begin(), disk.data().end());
    CHECK(inverse_warp_mask(win, 32, Affine2D::identity(), 32, 32) == disk);
    std::vector<float> zeros(32 * 32, 0.0F);
    CHECK(inverse_warp_mask(zeros, 32, Affine2D::identity(), 40, 20).area() == 0);
    CHECK(inverse_warp_mask(zeros, 32, Affine2D::identity(), 40, 20, 0.0).area() == 0);
}

TEST_CASE("forward then inverse warp of a disk keeps its shape")
{
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const int W = 160, H = 120, S = 64;
        const double s = rng.uniform(0.5, 2.0);
        const double r = 0.5 * S / s * rng.uniform(0.6, 0.9);
        const Mask disk = disk_mask(H, W, 80, 60, r);
        const Affine2D m = Affine2D::translation(S / 2.0, S / 2.0)
                               .compose(similarity(rng.uniform(0, 6.28), s, 0, 0))
                               .compose(Affine2D::translation(-80, -60));
        Image src(1, H, W);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                src.at(0, y, x) = disk.at(y, x);
        AlignTransform t;
        t.matrix = m;
        const auto win = warp_window(src, t, S);
        const Mask back = inverse_warp_mask(win.pixels.plane(0), S, m, W, H);
        CHECK(iou(back, disk) >= 0.95);
    }
}

TEST_CASE("transform_pose maps valid joints only")
{
    std::array<bool, kNumJoints> v{};
    v[3] = true;
    const Pose p = make_pose(figure_points(), CoordinateSpace::pixel(1, 1), v);
    const Pose q = transform_pose(p, Affine2D::scaling(64, 64), 64);
    CHECK(q[3].x == doctest::Approx(64 * figure_points()[3].x));
    CHECK(q[0] == EncodedKeypoint{});
    CHECK(q.space == CoordinateSpace::pixel(64, 64));
}

TEST_CASE("bilinear sampling")
{
    std::vector<float> plane{0, 1, 2, 3};
    CHECK(sample_bilinear(plane, 2, 2, 0.5, 0.5) == doctest::Approx(1.5));
    CHECK(sample_bilinear(plane, 2, 2, 1, 1) == doctest::Approx(3));
    CHECK(sample_bilinear(plane, 2, 2, -0.5, 0) == doctest::Approx(0));
    CHECK(sample_bilinear(plane, 2, 2, 5, 0) == 0.0F);
}
