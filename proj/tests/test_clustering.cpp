#include "doctest.h"

#include <algorithm>
#include <set>

#include "pose2seg/clustering.hpp"
#include "pose2seg/error.hpp"
#include "support.hpp"

using namespace pose2seg;
using testing::J;

namespace {

Pose random_unit_pose(Rng& rng, int min_valid = 9)
{
    Pose p;
    std::vector<std::size_t> order(kNumJoints);
    for (std::size_t j = 0; j < kNumJoints; ++j)
        order[j] = j;
    for (std::size_t i = kNumJoints - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    const int n = min_valid + static_cast<int>(rng.below(static_cast<std::uint64_t>(kNumJoints - min_valid + 1)));
    for (int i = 0; i < n; ++i)
        p[order[static_cast<std::size_t>(i)]] = {rng.uniform(), rng.uniform(), 1 + static_cast<int>(rng.below(2))};
    return p;
}

} // namespace

TEST_CASE("normalize_pose maps the square RoI onto the unit square")
{
    Pose p;
    p.space = CoordinateSpace::pixel(200, 200);
    p[0] = {50, 50, 2};
    Pose n = normalize_pose(p, {0, 0, 100, 100});
    CHECK(n[0].x == doctest::Approx(0.5));
    CHECK(n[0].y == doctest::Approx(0.5));
    CHECK(n[0].v == 2);

    p[0] = {25, 50, 2};
    p[1] = {0, 0, 1};
    n = normalize_pose(p, {0, 0, 50, 100});
    CHECK(n[0].x == doctest::Approx(0.5));
    CHECK(n[0].y == doctest::Approx(0.5));
    // The square is (-25, 0, 100, 100), so (0, 0) lands at (0.25, 0).
    CHECK(n[1].x == doctest::Approx(0.25));
    CHECK(n[1].y == doctest::Approx(0.0));
    CHECK(n[1].v == 1);
    CHECK(n[2] == EncodedKeypoint{});
    CHECK(n.space == CoordinateSpace::unit_square());
}

TEST_CASE("normalize_pose drops joints outside the RoI and rejects empty boxes")
{
    Pose p;
    p.space = CoordinateSpace::pixel(500, 500);
    p[0] = {300, 10, 2};
    const Pose n = normalize_pose(p, {0, 0, 100, 100});
    CHECK(n[0] == EncodedKeypoint{});
    CHECK_THROWS_AS(normalize_pose(p, {0, 0, 0, 10}), Error);
    CHECK_THROWS_AS(normalize_pose(p, {0, 0, 10, -1}), Error);
}

TEST_CASE("pose_distance examples")
{
    Pose p, q;
    CHECK(pose_distance(p, p) == 0.0);
    p[3] = {0.2, 0.7, 2};
    q[3] = {0.2, 0.7, 1};
    CHECK(pose_distance(p, q) == doctest::Approx(1.0));

    Pose empty, full;
    for (auto& k : full.keypoints)
        k = {0.5, 0.5, 2};
    CHECK(pose_distance(empty, full) == doctest::Approx(68.0));
}

TEST_CASE("K = 1 yields the per-channel mean with the total variance as objective")
{
    Rng rng(11);
    std::vector<Pose> poses;
    for (int i = 0; i < 40; ++i)
        poses.push_back(random_unit_pose(rng));
    const auto r = kmeans_templates(poses, {1, 5, 100});
    REQUIRE(r.templates.size() == 1);

    std::array<double, 3 * kNumJoints> mean{};
    for (const auto& p : poses)
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            mean[3 * j] += p[j].x / 40.0;
            mean[3 * j + 1] += p[j].y / 40.0;
            mean[3 * j + 2] += p[j].v / 40.0;
        }
    double variance = 0.0;
    for (const auto& p : poses)
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            const double d[3] = {p[j].x - mean[3 * j], p[j].y - mean[3 * j + 1], p[j].v - mean[3 * j + 2]};
            variance += d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        }
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        CHECK(r.templates[0].mean[j].x == doctest::Approx(mean[3 * j]).epsilon(1e-12));
        CHECK(r.templates[0].mean[j].y == doctest::Approx(mean[3 * j + 1]).epsilon(1e-12));
        CHECK(r.templates[0].mean[j].v == doctest::Approx(mean[3 * j + 2]).epsilon(1e-12));
    }
    CHECK(r.objective == doctest::Approx(variance).epsilon(1e-10));
}

TEST_CASE("well separated identical groups are recovered exactly")
{
    Rng rng(2);
    std::array<Pose, 3> groups{random_unit_pose(rng), random_unit_pose(rng), random_unit_pose(rng)};
    std::vector<Pose> poses;
    for (int i = 0; i < 30; ++i)
        poses.push_back(groups[static_cast<std::size_t>(i % 3)]);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = kmeans_templates(poses, {3, seed, 100});
        CHECK(r.objective == 0.0);
        CHECK(r.converged);
        std::set<int> labels(r.assignments.begin(), r.assignments.end());
        CHECK(labels.size() == 3);
        for (std::size_t i = 0; i < poses.size(); ++i) {
            CHECK(r.assignments[i] == r.assignments[i % 3]);
            CHECK(pose_distance(poses[i], r.templates[static_cast<std::size_t>(r.assignments[i])]) == 0.0);
        }
    }
}

TEST_CASE("objective never increases and matches the recomputed value")
{
    for (std::uint64_t ds = 0; ds < 20; ++ds) {
        Rng rng(100 + ds);
        std::vector<Pose> poses;
        for (int i = 0; i < 60; ++i)
            poses.push_back(random_unit_pose(rng));
        const auto r = kmeans_templates(poses, {4, ds, 300});
        REQUIRE(!r.objective_history.empty());
        for (std::size_t i = 1; i < r.objective_history.size(); ++i)
            CHECK(r.objective_history[i] <= r.objective_history[i - 1] + 1e-12);
        CHECK(clustering_objective(poses, r.templates, r.assignments) == doctest::Approx(r.objective));
    }
}

TEST_CASE("seeded runs are bit identical")
{
    Rng rng(9);
    std::vector<Pose> poses;
    for (int i = 0; i < 50; ++i)
        poses.push_back(random_unit_pose(rng));
    const auto a = kmeans_templates(poses, {3, 7, 300});
    const auto b = kmeans_templates(poses, {3, 7, 300});
    CHECK(a.assignments == b.assignments);
    CHECK(a.objective_history == b.objective_history);
    for (std::size_t t = 0; t < a.templates.size(); ++t)
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            CHECK(a.templates[t].mean[j].x == b.templates[t].mean[j].x);
            CHECK(a.templates[t].mean[j].v == b.templates[t].mean[j].v);
        }
}

TEST_CASE("poses with at most eight valid joints are not clustered")
{
    Rng rng(4);
    std::vector<Pose> poses;
    poses.push_back(random_unit_pose(rng, 9));
    Pose sparse;
    for (std::size_t j = 0; j < 8; ++j)
        sparse[j] = {0.1, 0.1, 2};
    poses.push_back(sparse);
    poses.push_back(random_unit_pose(rng, 12));
    const auto r = kmeans_templates(poses, {2, 0, 10});
    CHECK(r.used == std::vector<std::size_t>{0, 2});
    CHECK_THROWS_AS(kmeans_templates(poses, {3, 0, 10}), Error);
    try {
        kmeans_templates({sparse}, {1, 0, 10});
    }
    catch (const Error& e) {
        CHECK(e.code() == ErrorCode::insufficient_data);
    }
}

TEST_CASE("template validity follows the mean visibility")
{
    std::array<TemplateJoint, kNumJoints> mean{};
    mean[0] = {0.3, 0.3, 1.4};
    mean[1] = {0.3, 0.3, 0.5};
    mean[2] = {0.3, 0.3, 0.51};
    const auto t = PoseTemplate::from_mean(mean);
    CHECK(t.valid_mask[0]);
    CHECK_FALSE(t.valid_mask[1]);
    CHECK(t.valid_mask[2]);
    CHECK(t.valid_joints() == 2);
    CHECK_FALSE(t.usable());
}
