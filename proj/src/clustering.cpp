#include "pose2seg/clustering.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pose2seg/error.hpp"
#include "pose2seg/random.hpp"

namespace pose2seg {

namespace {

using Mean = std::array<TemplateJoint, kNumJoints>;

Mean mean_of(const Pose& p)
{
    Mean m;
    for (std::size_t j = 0; j < kNumJoints; ++j)
        m[j] = {p[j].x, p[j].y, static_cast<double>(p[j].v)};
    return m;
}

double distance_to_mean(const Pose& p, const Mean& m)
{
    double d = 0.0;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const double dx = p[j].x - m[j].x;
        const double dy = p[j].y - m[j].y;
        const double dv = static_cast<double>(p[j].v) - m[j].v;
        d += dx * dx + dy * dy + dv * dv;
    }
    return d;
}

// Index of the nearest mean; ties resolve to the lowest index.
std::pair<int, double> nearest(const Pose& p, const std::vector<Mean>& means)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double d = distance_to_mean(p, means[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return {best, best_d};
}

std::vector<Mean> seed_plus_plus(const std::vector<const Pose*>& poses, int k, Rng& rng)
{
    std::vector<Mean> means;
    means.reserve(static_cast<std::size_t>(k));
    means.push_back(mean_of(*poses[rng.below(poses.size())]));

    std::vector<double> d2(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i)
        d2[i] = distance_to_mean(*poses[i], means.front());

    while (static_cast<int>(means.size()) < k) {
        double total = 0.0;
        for (double d : d2)
            total += d;

        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = poses.size() - 1;
            for (std::size_t i = 0; i < poses.size(); ++i) {
                acc += d2[i];
                if (r < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            // r can land on the trailing zero-weight tail through rounding.
            while (d2[pick] == 0.0 && pick > 0)
                --pick;
        }
        else {
            pick = rng.below(poses.size());
        }

        means.push_back(mean_of(*poses[pick]));
        for (std::size_t i = 0; i < poses.size(); ++i)
            d2[i] = std::min(d2[i], distance_to_mean(*poses[i], means.back()));
    }
    return means;
}

// Sums are taken relative to the first member of each cluster, so a cluster
// of identical poses reproduces that pose exactly.
std::vector<Mean> recompute_means(const std::vector<const Pose*>& poses, const std::vector<int>& assignment, int k)
{
    std::vector<const Pose*> ref(static_cast<std::size_t>(k), nullptr);
    std::vector<Mean> sums(static_cast<std::size_t>(k), Mean{});
    for (auto& m : sums)
        m.fill({0.0, 0.0, 0.0});
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);

    for (std::size_t i = 0; i < poses.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        if (ref[c] == nullptr)
            ref[c] = poses[i];
        ++counts[c];
        const Pose& p = *poses[i];
        const Pose& r = *ref[c];
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            sums[c][j].x += p[j].x - r[j].x;
            sums[c][j].y += p[j].y - r[j].y;
            sums[c][j].v += static_cast<double>(p[j].v - r[j].v);
        }
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (ref[c] == nullptr)
            continue;
        const double n = static_cast<double>(counts[c]);
        const Pose& r = *ref[c];
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            auto& joint = sums[c][j];
            joint.x = r[j].x + joint.x / n;
            joint.y = r[j].y + joint.y / n;
            joint.v = static_cast<double>(r[j].v) + joint.v / n;
        }
    }
    return sums;
}

// Moves the farthest point of a cluster with more than one member into each
// empty cluster.
void reseed_empty(const std::vector<const Pose*>& poses, const std::vector<Mean>& means, std::vector<int>& assignment,
                  int k)
{
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment)
        ++counts[static_cast<std::size_t>(a)];

    std::vector<bool> moved(poses.size(), false);
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] != 0)
            continue;
        std::size_t far = poses.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < poses.size(); ++i) {
            const auto own = static_cast<std::size_t>(assignment[i]);
            if (moved[i] || counts[own] < 2)
                continue;
            const double d = distance_to_mean(*poses[i], means[own]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == poses.size())
            throw Error(ErrorCode::insufficient_data, "cannot re-seed an empty cluster");
        --counts[static_cast<std::size_t>(assignment[far])];
        assignment[far] = c;
        ++counts[static_cast<std::size_t>(c)];
        moved[far] = true;
    }
}

double objective_of(const std::vector<const Pose*>& poses, const std::vector<Mean>& means,
                    const std::vector<int>& assignment)
{
    double total = 0.0;
    for (std::size_t i = 0; i < poses.size(); ++i)
        total += distance_to_mean(*poses[i], means[static_cast<std::size_t>(assignment[i])]);
    return total;
}

} // namespace

Pose normalize_pose(const Pose& p, const Rect& bbox)
{
    if (!(bbox.w > 0.0) || !(bbox.h > 0.0))
        throw Error(ErrorCode::invalid_bbox, "bbox must have positive width and height");

    const double side = std::max(bbox.w, bbox.h);
    const double x0 = bbox.x + 0.5 * bbox.w - 0.5 * side;
    const double y0 = bbox.y + 0.5 * bbox.h - 0.5 * side;

    Pose out;
    out.space = CoordinateSpace::unit_square();
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (!p[j].valid())
            continue;
        const double u = (p[j].x - x0) / side;
        const double v = (p[j].y - y0) / side;
        if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)
            out[j] = {u, v, p[j].v};
    }
    return out;
}

double pose_distance(const Pose& p, const Pose& q)
{
    double d = 0.0;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const double dx = p[j].x - q[j].x;
        const double dy = p[j].y - q[j].y;
        const double dv = static_cast<double>(p[j].v - q[j].v);
        d += dx * dx + dy * dy + dv * dv;
    }
    return d;
}

double pose_distance(const Pose& p, const PoseTemplate& t) { return distance_to_mean(p, t.mean); }

PoseTemplate PoseTemplate::from_mean(const Mean& mean)
{
    PoseTemplate t;
    t.mean = mean;
    for (std::size_t j = 0; j < kNumJoints; ++j)
        t.valid_mask[j] = mean[j].v > 0.5;
    return t;
}

int PoseTemplate::valid_joints() const
{
    return static_cast<int>(std::count(valid_mask.begin(), valid_mask.end(), true));
}

double clustering_objective(const std::vector<Pose>& poses, const std::vector<PoseTemplate>& templates,
                            const std::vector<int>& assignments)
{
    double total = 0.0;
    for (std::size_t i = 0; i < poses.size(); ++i)
        total += pose_distance(poses[i], templates[static_cast<std::size_t>(assignments[i])]);
    return total;
}

ClusteringResult kmeans_templates(const std::vector<Pose>& poses, const KMeansOptions& options)
{
    if (options.k < 1)
        throw Error(ErrorCode::insufficient_data, "k must be at least 1");

    ClusteringResult result;
    std::vector<const Pose*> kept;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        if (valid_count(poses[i]) >= kMinClusteringJoints) {
            kept.push_back(&poses[i]);
            result.used.push_back(i);
        }
    }
    if (kept.size() < static_cast<std::size_t>(options.k))
        throw Error(ErrorCode::insufficient_data, "only " + std::to_string(kept.size()) +
                                                      " poses have more than 8 valid joints, need at least " +
                                                      std::to_string(options.k));

    Rng rng(options.seed);
    std::vector<Mean> means = seed_plus_plus(kept, options.k, rng);
    std::vector<int> assignment(kept.size(), -1);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        std::vector<int> next(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            next[i] = nearest(*kept[i], means).first;
        reseed_empty(kept, means, next, options.k);

        const bool unchanged = next == assignment;
        assignment = std::move(next);
        if (unchanged) {
            result.converged = true;
            break;
        }
        means = recompute_means(kept, assignment, options.k);
        result.iterations = iter + 1;
        result.objective_history.push_back(objective_of(kept, means, assignment));
    }

    for (int c = 0; c < options.k; ++c) {
        result.templates.push_back(PoseTemplate::from_mean(means[static_cast<std::size_t>(c)]));
        if (!result.templates.back().usable())
            result.unusable_templates.push_back(c);
    }
    result.assignments = std::move(assignment);
    result.objective = objective_of(kept, means, result.assignments);
    return result;
}

} // namespace pose2seg
