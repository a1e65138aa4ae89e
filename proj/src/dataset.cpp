#include "pose2seg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "pose2seg/error.hpp"
#include "pose2seg/random.hpp"

namespace pose2seg {

const ImageInfo* Dataset::find_image(long long id) const
{
    const auto it = std::lower_bound(images.begin(), images.end(), id,
                                     [](const ImageInfo& im, long long v) { return im.id < v; });
    return it != images.end() && it->id == id ? &*it : nullptr;
}

const ImageInfo& Dataset::image(long long id) const
{
    const auto* im = find_image(id);
    if (im == nullptr)
        throw Error(ErrorCode::reference, "unknown image id " + std::to_string(id));
    return *im;
}

std::map<long long, std::vector<const InstanceAnnotation*>> Dataset::by_image() const
{
    std::map<long long, std::vector<const InstanceAnnotation*>> groups;
    for (const auto& inst : instances)
        groups[inst.image_id].push_back(&inst);
    return groups;
}

double mask_iou(const Mask& a, const Mask& b)
{
    if (a.height() != b.height() || a.width() != b.width())
        throw Error(ErrorCode::dimension_mismatch, "mask_iou requires equal dimensions");
    std::size_t inter = 0, uni = 0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const bool x = da[i] != 0, y = db[i] != 0;
        inter += (x && y) ? 1 : 0;
        uni += (x || y) ? 1 : 0;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double bbox_iou(const Rect& a, const Rect& b)
{
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

Severity classify_severity(double max_iou)
{
    if (max_iou < 0.5)
        return Severity::none;
    if (max_iou <= 0.75)
        return Severity::moderate;
    return Severity::hard;
}

const char* to_string(Severity s)
{
    switch (s) {
    case Severity::none: return "none";
    case Severity::moderate: return "moderate";
    case Severity::hard: return "hard";
    }
    return "none";
}

std::vector<OcclusionRecord> max_iou_records(const std::vector<const InstanceAnnotation*>& instances,
                                             const ImageInfo& image, const OcclusionOptions& options)
{
    std::vector<const InstanceAnnotation*> people;
    for (const auto* inst : instances)
        if (options.include_crowd || !inst->iscrowd)
            people.push_back(inst);
    std::sort(people.begin(), people.end(), [](auto* a, auto* b) { return a->id < b->id; });

    std::vector<Mask> masks;
    if (options.mode == MaxIouMode::mask) {
        for (const auto* inst : people) {
            if (!inst->mask)
                throw Error(ErrorCode::format, "annotation " + std::to_string(inst->id) + " has no segmentation");
            masks.push_back(decode_mask(*inst->mask, image.width, image.height));
        }
    }

    std::vector<OcclusionRecord> records(people.size());
    for (std::size_t i = 0; i < people.size(); ++i) {
        records[i].instance_id = people[i]->id;
        records[i].image_id = people[i]->image_id;
    }
    std::vector<double> iou(people.size() * people.size(), 0.0);
    for (std::size_t i = 0; i < people.size(); ++i) {
        for (std::size_t j = i + 1; j < people.size(); ++j) {
            const double v = options.mode == MaxIouMode::mask ? mask_iou(masks[i], masks[j])
                                                               : bbox_iou(people[i]->bbox, people[j]->bbox);
            iou[i * people.size() + j] = v;
            iou[j * people.size() + i] = v;
        }
    }
    // Partners are visited in id order, so strict comparison keeps the lowest id on ties.
    for (std::size_t i = 0; i < people.size(); ++i) {
        for (std::size_t j = 0; j < people.size(); ++j) {
            if (j == i)
                continue;
            const double v = iou[i * people.size() + j];
            if (records[i].partner_id < 0 || v > records[i].max_iou) {
                records[i].max_iou = v;
                records[i].partner_id = people[j]->id;
            }
        }
    }
    for (auto& r : records)
        r.severity = classify_severity(r.max_iou);
    return records;
}

std::vector<OcclusionRecord> occlusion_records(const Dataset& dataset, const OcclusionOptions& options)
{
    std::vector<OcclusionRecord> all;
    for (const auto& [image_id, group] : dataset.by_image()) {
        auto recs = max_iou_records(group, dataset.image(image_id), options);
        all.insert(all.end(), recs.begin(), recs.end());
    }
    return all;
}

OcclusionStats summarize(const std::vector<OcclusionRecord>& records)
{
    OcclusionStats s;
    std::set<long long> images;
    double sum = 0.0;
    for (const auto& r : records) {
        images.insert(r.image_id);
        ++s.persons;
        s.occluded_050 += r.max_iou > 0.5 ? 1 : 0;
        s.occluded_075 += r.max_iou > 0.75 ? 1 : 0;
        sum += r.max_iou;
    }
    s.images = images.size();
    s.average_max_iou = s.persons == 0 ? 0.0 : sum / static_cast<double>(s.persons);
    return s;
}

namespace {

std::string with_percent(std::size_t count, std::size_t total)
{
    if (total == 0)
        return std::to_string(count);
    const double pct = 100.0 * static_cast<double>(count) / static_cast<double>(total);
    char buf[64];
    if (pct > 0.0 && pct < 0.1)
        std::snprintf(buf, sizeof buf, "%zu(<0.1%%)", count);
    else if (pct > 0.0 && pct < 1.0)
        std::snprintf(buf, sizeof buf, "%zu(<1.0%%)", count);
    else
        std::snprintf(buf, sizeof buf, "%zu(%.0f%%)", count, pct);
    return buf;
}

} // namespace

std::string format_stats_table(const std::vector<std::pair<std::string, OcclusionStats>>& columns)
{
    std::vector<std::string> labels{"", "#images", "#persons", "#persons (oc0.5)", "#persons (oc0.75)",
                                    "#average MaxIoU"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& [name, s] : columns) {
        char avg[32];
        std::snprintf(avg, sizeof avg, "%.2f", s.average_max_iou);
        cells.push_back({name, std::to_string(s.images), std::to_string(s.persons), with_percent(s.occluded_050, s.persons),
                         with_percent(s.occluded_075, s.persons), avg});
    }

    std::size_t label_w = 0;
    for (const auto& l : labels)
        label_w = std::max(label_w, l.size());
    std::vector<std::size_t> col_w;
    for (const auto& col : cells) {
        std::size_t w = 0;
        for (const auto& c : col)
            w = std::max(w, c.size());
        col_w.push_back(w);
    }

    std::ostringstream os;
    for (std::size_t row = 0; row < labels.size(); ++row) {
        os << labels[row] << std::string(label_w - labels[row].size(), ' ');
        for (std::size_t c = 0; c < cells.size(); ++c)
            os << "  " << std::string(col_w[c] - cells[c][row].size(), ' ') << cells[c][row];
        os << '\n';
    }
    return os.str();
}

Dataset subset_images(const Dataset& dataset, const std::vector<long long>& image_ids)
{
    const std::set<long long> keep(image_ids.begin(), image_ids.end());
    Dataset out;
    for (const auto& im : dataset.images)
        if (keep.count(im.id) != 0)
            out.images.push_back(im);
    for (const auto& inst : dataset.instances)
        if (keep.count(inst.image_id) != 0)
            out.instances.push_back(inst);
    return out;
}

FilterResult filter_occluded(const Dataset& dataset, double threshold, const OcclusionOptions& options)
{
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::usage, "threshold must lie in [0, 1]");

    FilterResult result;
    result.records = occlusion_records(dataset, options);
    result.input_stats = summarize(result.records);

    std::set<long long> kept_instances, kept_images;
    std::vector<OcclusionRecord> kept_records;
    for (const auto& r : result.records) {
        if (r.max_iou > threshold) {
            kept_instances.insert(r.instance_id);
            kept_images.insert(r.image_id);
            kept_records.push_back(r);
        }
    }
    for (const auto& im : dataset.images)
        if (kept_images.count(im.id) != 0)
            result.subset.images.push_back(im);
    for (const auto& inst : dataset.instances)
        if (kept_instances.count(inst.id) != 0)
            result.subset.instances.push_back(inst);
    result.subset_stats = summarize(kept_records);
    return result;
}

Split split_dataset(const Dataset& dataset, std::uint64_t seed, double val_fraction)
{
    if (!(val_fraction >= 0.0 && val_fraction <= 1.0))
        throw Error(ErrorCode::usage, "val_fraction must lie in [0, 1]");

    std::vector<long long> ids;
    for (const auto& im : dataset.images)
        ids.push_back(im.id);
    std::sort(ids.begin(), ids.end());

    Rng rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.below(i)]);

    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ids.size())));
    const std::vector<long long> val(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
    const std::vector<long long> test(ids.begin() + static_cast<std::ptrdiff_t>(n_val), ids.end());
    return {subset_images(dataset, val), subset_images(dataset, test)};
}

Split split_from_manifest(const Dataset& dataset, const std::vector<long long>& val_ids,
                          const std::vector<long long>& test_ids)
{
    std::set<long long> seen;
    for (const auto& ids : {std::cref(val_ids), std::cref(test_ids)}) {
        for (long long id : ids.get()) {
            if (dataset.find_image(id) == nullptr)
                throw Error(ErrorCode::reference, "split manifest references unknown image id " + std::to_string(id));
            if (!seen.insert(id).second)
                throw Error(ErrorCode::format, "image id " + std::to_string(id) + " appears twice in the manifest");
        }
    }
    return {subset_images(dataset, val_ids), subset_images(dataset, test_ids)};
}

} // namespace pose2seg
