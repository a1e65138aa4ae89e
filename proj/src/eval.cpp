#include "pose2seg/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "pose2seg/error.hpp"

namespace pose2seg {

namespace {

bool score_order(const Prediction* a, const Prediction* b)
{
    if (a->score != b->score)
        return a->score > b->score;
    return a->id < b->id;
}

double crowd_iou(const Mask& pred, const Mask& crowd)
{
    if (pred.height() != crowd.height() || pred.width() != crowd.width())
        throw Error(ErrorCode::dimension_mismatch, "prediction and gt masks differ in size");
    std::size_t inter = 0, area = 0;
    const auto a = pred.data();
    const auto b = crowd.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        area += a[i] != 0 ? 1 : 0;
        inter += (a[i] != 0 && b[i] != 0) ? 1 : 0;
    }
    return area == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(area);
}

struct ImageEval {
    // per threshold, per sorted prediction
    std::vector<std::vector<bool>> matched;
    std::vector<std::vector<bool>> ignored;
    std::vector<const Prediction*> preds; // sorted, truncated to max_dets
    std::size_t gt_count = 0;             // non-ignored gts
};

// COCO evaluateImg for one image and one bin. gt_ignore marks gts outside the
// bin (or crowd); those are tried only after every non-ignored gt.
ImageEval evaluate_image(std::vector<const Prediction*> preds, const std::vector<const EvalGroundTruth*>& gts,
                         const std::vector<bool>& gt_ignore, const EvalParams& params,
                         const std::optional<std::pair<double, double>>& area_range)
{
    std::sort(preds.begin(), preds.end(), score_order);
    if (params.max_dets > 0 && preds.size() > static_cast<std::size_t>(params.max_dets))
        preds.resize(static_cast<std::size_t>(params.max_dets));

    std::vector<std::size_t> order(gts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gt_ignore[a] != gt_ignore[b])
            return !gt_ignore[a];
        return gts[a]->id < gts[b]->id;
    });

    std::vector<double> iou(preds.size() * gts.size());
    for (std::size_t d = 0; d < preds.size(); ++d)
        for (std::size_t g = 0; g < gts.size(); ++g)
            iou[d * gts.size() + g] = gts[g]->iscrowd ? crowd_iou(preds[d]->mask, gts[g]->mask)
                                                      : mask_iou(preds[d]->mask, gts[g]->mask);

    ImageEval out;
    out.preds = preds;
    for (std::size_t g = 0; g < gts.size(); ++g)
        out.gt_count += gt_ignore[g] ? 0 : 1;

    for (double t : params.iou_thresholds) {
        std::vector<bool> gt_taken(gts.size(), false);
        std::vector<bool> matched(preds.size(), false), ignored(preds.size(), false);
        for (std::size_t d = 0; d < preds.size(); ++d) {
            const double floor_iou = std::min(t, 1.0 - 1e-10);
            double best = -1.0;
            std::size_t m = gts.size();
            for (std::size_t g : order) {
                if (gt_taken[g] && !gts[g]->iscrowd)
                    continue;
                if (m != gts.size() && !gt_ignore[m] && gt_ignore[g])
                    break;
                const double v = iou[d * gts.size() + g];
                if (v < floor_iou || !(v > best))
                    continue;
                best = v;
                m = g;
            }
            if (m != gts.size()) {
                gt_taken[m] = true;
                matched[d] = true;
                ignored[d] = gt_ignore[m];
            }
            else if (area_range) {
                const double a = static_cast<double>(preds[d]->mask.area());
                ignored[d] = a < area_range->first || a > area_range->second;
            }
        }
        out.matched.push_back(std::move(matched));
        out.ignored.push_back(std::move(ignored));
    }
    return out;
}

} // namespace

Matching match_instances(const std::vector<Prediction>& preds, const std::vector<EvalGroundTruth>& gts,
                         double iou_threshold)
{
    std::vector<const Prediction*> ps;
    for (const auto& p : preds)
        ps.push_back(&p);
    std::sort(ps.begin(), ps.end(), score_order);

    std::vector<const EvalGroundTruth*> gs;
    for (const auto& g : gts)
        if (!g.iscrowd)
            gs.push_back(&g);
    std::sort(gs.begin(), gs.end(), [](auto* a, auto* b) { return a->id < b->id; });

    Matching m;
    std::vector<bool> taken(gs.size(), false);
    for (const auto* p : ps) {
        double best = -1.0;
        std::size_t pick = gs.size();
        for (std::size_t g = 0; g < gs.size(); ++g) {
            if (taken[g])
                continue;
            const double v = mask_iou(p->mask, gs[g]->mask);
            if (v >= iou_threshold && v > best) {
                best = v;
                pick = g;
            }
        }
        m.pred_ids.push_back(p->id);
        if (pick != gs.size()) {
            taken[pick] = true;
            m.matched_gt.push_back(gs[pick]->id);
            m.matched_iou.push_back(best);
            ++m.true_positives;
        }
        else {
            m.matched_gt.push_back(-1);
            m.matched_iou.push_back(0.0);
            ++m.false_positives;
        }
    }
    m.false_negatives = static_cast<int>(gs.size()) - m.true_positives;
    return m;
}

std::vector<EvalBin> size_bins()
{
    const double inf = std::numeric_limits<double>::infinity();
    return {
        {"all", [](const EvalGroundTruth&) { return true; }, std::nullopt},
        {"medium", [](const EvalGroundTruth& g) { return g.area >= kSmallAreaLimit && g.area <= kMediumAreaLimit; },
         std::make_pair(kSmallAreaLimit, kMediumAreaLimit)},
        {"large", [](const EvalGroundTruth& g) { return g.area > kMediumAreaLimit; },
         std::make_pair(std::nextafter(kMediumAreaLimit, inf), inf)},
    };
}

std::vector<EvalBin> occlusion_bins(const std::vector<OcclusionRecord>& records)
{
    auto severity = std::make_shared<std::map<long long, Severity>>();
    for (const auto& r : records)
        (*severity)[r.instance_id] = r.severity;
    auto in = [severity](Severity s) {
        return [severity, s](const EvalGroundTruth& g) {
            const auto it = severity->find(g.id);
            return it != severity->end() && it->second == s;
        };
    };
    return {
        {"all", [](const EvalGroundTruth&) { return true; }, std::nullopt},
        {"moderate", in(Severity::moderate), std::nullopt},
        {"hard", in(Severity::hard), std::nullopt},
    };
}

std::vector<double> coco_iou_thresholds()
{
    // Same construction as numpy.linspace(0.5, 0.95, 10).
    std::vector<double> t(10);
    const double step = (0.95 - 0.5) / 9.0;
    for (int i = 0; i < 10; ++i)
        t[static_cast<std::size_t>(i)] = i * step + 0.5;
    t.back() = 0.95;
    return t;
}

std::vector<double> coco_recall_thresholds()
{
    std::vector<double> r(101);
    const double step = 1.0 / 100.0;
    for (int i = 0; i < 101; ++i)
        r[static_cast<std::size_t>(i)] = i * step;
    r.back() = 1.0;
    return r;
}

const BinReport& ApReport::bin(const std::string& name) const
{
    for (const auto& b : bins)
        if (b.name == name)
            return b;
    throw Error(ErrorCode::reference, "no AP bin named " + name);
}

double ApReport::overall() const
{
    if (bins.empty() || !bins.front().ap)
        throw Error(ErrorCode::undefined_ap, "AP is undefined without ground truth");
    return *bins.front().ap;
}

ApReport average_precision(const std::vector<Prediction>& preds, const std::vector<EvalGroundTruth>& gts,
                           const EvalParams& params)
{
    std::map<long long, std::vector<const Prediction*>> preds_by_image;
    std::map<long long, std::vector<const EvalGroundTruth*>> gts_by_image;
    std::set<long long> image_ids;
    for (const auto& p : preds) {
        if (!std::isfinite(p.score))
            throw Error(ErrorCode::format, "prediction " + std::to_string(p.id) + " has a non-finite score");
        preds_by_image[p.image_id].push_back(&p);
        image_ids.insert(p.image_id);
    }
    for (const auto& g : gts) {
        gts_by_image[g.image_id].push_back(&g);
        image_ids.insert(g.image_id);
    }

    const auto recall_grid = coco_recall_thresholds();
    const std::size_t n_t = params.iou_thresholds.size();

    ApReport report;
    report.iou_thresholds = params.iou_thresholds;
    for (const auto& bin : params.bins) {
        auto area_range = bin.area_range;
        if (params.exclude_small) {
            const double lo = area_range ? std::max(area_range->first, kSmallAreaLimit) : kSmallAreaLimit;
            const double hi = area_range ? area_range->second : std::numeric_limits<double>::infinity();
            area_range = std::make_pair(lo, hi);
        }

        // (score, id, matched, ignored) per threshold, gathered over images
        struct Entry {
            double score;
            long long id;
        };
        std::vector<std::vector<std::pair<Entry, bool>>> entries(n_t);
        std::size_t gt_count = 0;
        for (long long image_id : image_ids) {
            static const std::vector<const Prediction*> no_preds;
            static const std::vector<const EvalGroundTruth*> no_gts;
            const auto pit = preds_by_image.find(image_id);
            const auto git = gts_by_image.find(image_id);
            const auto& ip = pit == preds_by_image.end() ? no_preds : pit->second;
            const auto& ig = git == gts_by_image.end() ? no_gts : git->second;

            std::vector<bool> ignore(ig.size());
            for (std::size_t g = 0; g < ig.size(); ++g)
                ignore[g] = ig[g]->iscrowd || !bin.contains(*ig[g]) ||
                            (params.exclude_small && ig[g]->area < kSmallAreaLimit);

            const ImageEval ev = evaluate_image(ip, ig, ignore, params, area_range);
            gt_count += ev.gt_count;
            for (std::size_t t = 0; t < n_t; ++t)
                for (std::size_t d = 0; d < ev.preds.size(); ++d)
                    if (!ev.ignored[t][d])
                        entries[t].push_back({{ev.preds[d]->score, ev.preds[d]->id}, ev.matched[t][d]});
        }

        BinReport br;
        br.name = bin.name;
        br.gt_count = gt_count;
        double ap_sum = 0.0;
        for (std::size_t t = 0; t < n_t; ++t) {
            auto& list = entries[t];
            std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
                if (a.first.score != b.first.score)
                    return a.first.score > b.first.score;
                return a.first.id < b.first.id;
            });

            std::vector<double> recall, precision;
            int tp = 0, fp = 0;
            for (const auto& [entry, is_tp] : list) {
                (is_tp ? tp : fp) += 1;
                recall.push_back(gt_count == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gt_count));
                precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
            }
            br.true_positives.push_back(tp);
            br.false_negatives.push_back(static_cast<int>(gt_count) - tp);
            br.max_recall.push_back(recall.empty() ? 0.0 : recall.back());

            for (std::size_t i = precision.size(); i-- > 1;)
                precision[i - 1] = std::max(precision[i - 1], precision[i]);

            std::vector<double> q(recall_grid.size(), 0.0);
            for (std::size_t r = 0; r < recall_grid.size(); ++r) {
                const auto it = std::lower_bound(recall.begin(), recall.end(), recall_grid[r]);
                if (it != recall.end())
                    q[r] = precision[static_cast<std::size_t>(it - recall.begin())];
            }
            double sum = 0.0;
            for (double v : q)
                sum += v;
            const double ap_t = sum / static_cast<double>(q.size());
            br.precision.push_back(std::move(q));
            if (gt_count == 0) {
                br.ap_per_threshold.push_back(std::nullopt);
            }
            else {
                br.ap_per_threshold.push_back(ap_t);
                ap_sum += ap_t;
            }
        }
        if (gt_count != 0 && n_t != 0)
            br.ap = ap_sum / static_cast<double>(n_t);
        report.bins.push_back(std::move(br));
    }
    return report;
}

std::string format_ap_table(const std::string& method, const ApReport& report)
{
    std::vector<std::string> header{"Method"};
    std::vector<std::string> row{method};
    for (const auto& b : report.bins) {
        header.push_back(b.name == "all" ? "AP" : "AP_" + b.name);
        char buf[32];
        if (b.ap)
            std::snprintf(buf, sizeof buf, "%.3f", *b.ap);
        else
            std::snprintf(buf, sizeof buf, "n/a");
        row.push_back(buf);
    }
    std::ostringstream os;
    for (const auto* line : {&header, &row}) {
        for (std::size_t i = 0; i < line->size(); ++i) {
            const std::size_t w = std::max(header[i].size(), row[i].size());
            const auto& cell = (*line)[i];
            if (i == 0)
                os << cell << std::string(w - cell.size(), ' ');
            else
                os << "  " << std::string(w - cell.size(), ' ') << cell;
        }
        os << '\n';
    }
    return os.str();
}

Rect keypoints_to_bbox(const Pose& p, double expand, double image_width, double image_height)
{
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (const auto& k : p.keypoints) {
        if (!k.valid())
            continue;
        x0 = std::min(x0, k.x);
        y0 = std::min(y0, k.y);
        x1 = std::max(x1, k.x);
        y1 = std::max(y1, k.y);
    }
    if (x0 > x1)
        throw Error(ErrorCode::insufficient_data, "pose has no valid keypoints");

    const double grow_x = 0.5 * expand * (x1 - x0);
    const double grow_y = 0.5 * expand * (y1 - y0);
    const double l = std::clamp(x0 - grow_x, 0.0, image_width);
    const double t = std::clamp(y0 - grow_y, 0.0, image_height);
    const double r = std::clamp(x1 + grow_x, 0.0, image_width);
    const double b = std::clamp(y1 + grow_y, 0.0, image_height);
    return {l, t, r - l, b - t};
}

std::vector<double> bbox_expand_grid()
{
    std::vector<double> grid;
    for (int pct = 30; pct <= 100; pct += 10)
        grid.push_back(pct / 100.0);
    return grid;
}

} // namespace pose2seg
