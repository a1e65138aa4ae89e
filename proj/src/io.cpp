#include "pose2seg/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pose2seg/error.hpp"

namespace pose2seg {

namespace {

constexpr char kTensorMagic[8] = {'P', '2', 'S', 'T', 'N', 'S', 'R', '\x01'};

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::format, what); }

const Json& require_array(const Json& doc, const char* key)
{
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array())
        format_error(std::string("annotation document lacks a '") + key + "' array");
    return doc[key];
}

long long require_id(const Json& obj, const char* key, const char* what)
{
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number_integer())
        format_error(std::string(what) + " record lacks an integer '" + key + "'");
    return obj[key].get<long long>();
}

std::optional<MaskSource> parse_segmentation(const Json& seg, std::string& problem)
{
    if (seg.is_array()) {
        Polygons polys;
        for (const auto& poly : seg) {
            if (!poly.is_array() || poly.size() % 2 != 0) {
                problem = "polygon must be a flat list with an even number of coordinates";
                return std::nullopt;
            }
            std::vector<double> coords;
            for (const auto& v : poly) {
                if (!v.is_number()) {
                    problem = "polygon coordinate is not a number";
                    return std::nullopt;
                }
                coords.push_back(v.get<double>());
            }
            polys.push_back(std::move(coords));
        }
        return polys;
    }
    if (seg.is_object() && seg.contains("size") && seg.contains("counts")) {
        const auto& size = seg["size"];
        if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() || !size[1].is_number_integer()) {
            problem = "RLE size must be [height, width]";
            return std::nullopt;
        }
        const int h = size[0].get<int>();
        const int w = size[1].get<int>();
        const auto& counts = seg["counts"];
        if (counts.is_string())
            return CompressedRle{h, w, counts.get<std::string>()};
        if (counts.is_array()) {
            Rle rle{h, w, {}};
            for (const auto& c : counts) {
                if (!c.is_number_integer() || c.get<long long>() < 0 || c.get<long long>() > UINT32_MAX) {
                    problem = "RLE counts must be non-negative integers";
                    return std::nullopt;
                }
                rle.counts.push_back(c.get<std::uint32_t>());
            }
            return rle;
        }
    }
    problem = "unrecognized segmentation encoding";
    return std::nullopt;
}

void put_u32(std::ostream& os, std::uint32_t v)
{
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is)
{
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw Error(ErrorCode::format, "truncated tensor header");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

} // namespace

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot read " + path.string());
    try {
        return Json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::format, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::io, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out)
        throw Error(ErrorCode::io, "failed writing " + path.string());
}

Dataset parse_annotations(const Json& doc)
{
    const auto& images = require_array(doc, "images");
    const auto& annotations = require_array(doc, "annotations");
    const auto& categories = require_array(doc, "categories");

    std::set<long long> category_ids, person_ids;
    for (const auto& c : categories) {
        const long long id = require_id(c, "id", "category");
        category_ids.insert(id);
        if (c.contains("name") && c["name"] == "person")
            person_ids.insert(id);
    }

    Dataset ds;
    for (const auto& im : images) {
        ImageInfo info;
        info.id = require_id(im, "id", "image");
        if (!im.contains("width") || !im.contains("height") || !im["width"].is_number_integer() ||
            !im["height"].is_number_integer())
            format_error("image " + std::to_string(info.id) + " lacks integer width/height");
        info.width = im["width"].get<int>();
        info.height = im["height"].get<int>();
        if (info.width <= 0 || info.height <= 0)
            format_error("image " + std::to_string(info.id) + " has non-positive size");
        if (im.contains("file_name") && im["file_name"].is_string())
            info.file_name = im["file_name"].get<std::string>();
        ds.images.push_back(std::move(info));
    }
    std::sort(ds.images.begin(), ds.images.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < ds.images.size(); ++i)
        if (ds.images[i].id == ds.images[i - 1].id)
            format_error("duplicate image id " + std::to_string(ds.images[i].id));

    for (const auto& a : annotations) {
        InstanceAnnotation inst;
        inst.id = require_id(a, "id", "annotation");
        inst.image_id = require_id(a, "image_id", "annotation");
        const long long category = require_id(a, "category_id", "annotation");
        if (category_ids.count(category) == 0)
            throw Error(ErrorCode::reference, "annotation " + std::to_string(inst.id) + " references unknown category " +
                                                  std::to_string(category));
        const ImageInfo* image = ds.find_image(inst.image_id);
        if (image == nullptr)
            throw Error(ErrorCode::reference, "annotation " + std::to_string(inst.id) + " references unknown image_id " +
                                                  std::to_string(inst.image_id));
        if (person_ids.count(category) == 0)
            continue;

        const auto& bbox = a.contains("bbox") ? a["bbox"] : Json();
        if (!bbox.is_array() || bbox.size() != 4 ||
            !std::all_of(bbox.begin(), bbox.end(), [](const Json& v) { return v.is_number(); })) {
            ds.issues.push_back({inst.id, "dropped: bbox must be [x, y, w, h]"});
            continue;
        }
        inst.bbox = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(), bbox[3].get<double>()};
        if (inst.bbox.w < 0.0 || inst.bbox.h < 0.0) {
            ds.issues.push_back({inst.id, "dropped: bbox has negative extent"});
            continue;
        }

        inst.iscrowd = a.contains("iscrowd") && a["iscrowd"].is_number() && a["iscrowd"].get<double>() != 0.0;
        inst.area = a.contains("area") && a["area"].is_number() ? a["area"].get<double>() : inst.bbox.area();

        if (a.contains("keypoints") && !a["keypoints"].is_null()) {
            const auto& kp = a["keypoints"];
            if (!kp.is_array() || kp.size() != 3 * kNumJoints ||
                !std::all_of(kp.begin(), kp.end(), [](const Json& v) { return v.is_number(); })) {
                ds.issues.push_back({inst.id, "keypoints ignored: expected 51 numbers"});
            }
            else {
                const auto space = CoordinateSpace::pixel(image->width, image->height);
                Pose pose;
                pose.space = space;
                for (std::size_t j = 0; j < kNumJoints; ++j) {
                    const double x = kp[3 * j].get<double>();
                    const double y = kp[3 * j + 1].get<double>();
                    const double v = kp[3 * j + 2].get<double>();
                    try {
                        if (v != std::floor(v))
                            throw Error(ErrorCode::invalid_keypoint, "non-integer visibility");
                        pose[j] = encode_keypoint(x, y, static_cast<int>(v), space);
                    }
                    catch (const Error& e) {
                        ds.issues.push_back({inst.id, "joint " + std::string(kKeypoints[j].name) +
                                                          " treated as not in image: " + e.what()});
                    }
                }
                inst.keypoints = pose;
            }
        }

        if (a.contains("segmentation") && !a["segmentation"].is_null()) {
            std::string problem;
            inst.mask = parse_segmentation(a["segmentation"], problem);
            if (!inst.mask)
                ds.issues.push_back({inst.id, "segmentation ignored: " + problem});
        }
        ds.instances.push_back(std::move(inst));
    }
    std::sort(ds.instances.begin(), ds.instances.end(), [](const auto& x, const auto& y) {
        return x.image_id != y.image_id ? x.image_id < y.image_id : x.id < y.id;
    });
    return ds;
}

Json subset_document(const Json& original, const Dataset& subset)
{
    std::set<long long> images, annotations;
    for (const auto& im : subset.images)
        images.insert(im.id);
    for (const auto& inst : subset.instances)
        annotations.insert(inst.id);

    Json out = Json::object();
    for (const auto& [key, value] : original.items()) {
        if (key == "images") {
            Json kept = Json::array();
            for (const auto& im : value)
                if (images.count(im["id"].get<long long>()) != 0)
                    kept.push_back(im);
            out[key] = std::move(kept);
        }
        else if (key == "annotations") {
            Json kept = Json::array();
            for (const auto& a : value)
                if (annotations.count(a["id"].get<long long>()) != 0)
                    kept.push_back(a);
            out[key] = std::move(kept);
        }
        else {
            out[key] = value;
        }
    }
    return out;
}

Json template_bank_to_json(const std::vector<PoseTemplate>& templates)
{
    Json names = Json::array();
    for (const auto& k : kKeypoints)
        names.push_back(std::string(k.name));
    Json list = Json::array();
    for (const auto& t : templates) {
        Json mean = Json::array();
        Json mask = Json::array();
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            mean.push_back({t.mean[j].x, t.mean[j].y, t.mean[j].v});
            mask.push_back(t.valid_mask[j]);
        }
        list.push_back({{"mean", std::move(mean)}, {"valid_mask", std::move(mask)}});
    }
    return {{"schema_version", kSchemaVersion},
            {"version", kSchemaVersion},
            {"K", templates.size()},
            {"joint_names", std::move(names)},
            {"templates", std::move(list)}};
}

std::vector<PoseTemplate> template_bank_from_json(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer())
        format_error("template bank lacks an integer 'version'");
    if (doc["version"].get<int>() != kSchemaVersion)
        format_error("unsupported template bank version " + std::to_string(doc["version"].get<int>()));
    if (!doc.contains("templates") || !doc["templates"].is_array())
        format_error("template bank lacks a 'templates' array");
    if (doc.contains("joint_names")) {
        const auto& names = doc["joint_names"];
        if (!names.is_array() || names.size() != kNumJoints)
            format_error("template bank joint_names must list 17 joints");
        for (std::size_t j = 0; j < kNumJoints; ++j)
            if (names[j] != std::string(kKeypoints[j].name))
                format_error("template bank joint order differs from the COCO order at index " + std::to_string(j));
    }

    std::vector<PoseTemplate> bank;
    for (const auto& t : doc["templates"]) {
        if (!t.contains("mean") || !t["mean"].is_array() || t["mean"].size() != kNumJoints)
            format_error("template mean must hold 17 [x, y, v] triples");
        std::array<TemplateJoint, kNumJoints> mean;
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            const auto& triple = t["mean"][j];
            if (!triple.is_array() || triple.size() != 3 ||
                !std::all_of(triple.begin(), triple.end(), [](const Json& v) { return v.is_number(); }))
                format_error("template mean entries must be [x, y, v]");
            mean[j] = {triple[0].get<double>(), triple[1].get<double>(), triple[2].get<double>()};
        }
        auto tmpl = PoseTemplate::from_mean(mean);
        if (t.contains("valid_mask")) {
            const auto& mask = t["valid_mask"];
            if (!mask.is_array() || mask.size() != kNumJoints)
                format_error("valid_mask must hold 17 booleans");
            for (std::size_t j = 0; j < kNumJoints; ++j)
                if (!mask[j].is_boolean() || mask[j].get<bool>() != tmpl.valid_mask[j])
                    format_error("valid_mask disagrees with mean v > 0.5 at joint " + std::to_string(j));
        }
        bank.push_back(tmpl);
    }
    if (doc.contains("K") && (!doc["K"].is_number_integer() || doc["K"].get<std::size_t>() != bank.size()))
        format_error("template bank K does not match the number of templates");
    if (bank.empty())
        format_error("template bank is empty");
    return bank;
}

Json transform_to_json(const AlignTransform& t)
{
    const auto& m = t.matrix.m;
    return {{"schema_version", kSchemaVersion},
            {"matrix", {{m[0], m[1], m[2]}, {m[3], m[4], m[5]}}},
            {"flipped", t.flipped},
            {"residual", t.residual},
            {"score", t.score},
            {"template_index", t.template_index},
            {"fallback", t.fallback}};
}

std::vector<Prediction> parse_results(const Json& doc, const Dataset& gt)
{
    if (!doc.is_array())
        format_error("results document must be a JSON array");
    std::vector<Prediction> preds;
    long long next_id = 1;
    for (const auto& r : doc) {
        Prediction p;
        p.id = next_id++;
        p.image_id = require_id(r, "image_id", "result");
        const ImageInfo* image = gt.find_image(p.image_id);
        if (image == nullptr)
            throw Error(ErrorCode::reference, "result references unknown image_id " + std::to_string(p.image_id));
        if (!r.contains("score") || !r["score"].is_number())
            format_error("result lacks a numeric score");
        p.score = r["score"].get<double>();
        if (!r.contains("segmentation"))
            format_error("result lacks a segmentation");
        std::string problem;
        const auto source = parse_segmentation(r["segmentation"], problem);
        if (!source)
            format_error("result segmentation: " + problem);
        p.mask = decode_mask(*source, image->width, image->height);
        preds.push_back(std::move(p));
    }
    return preds;
}

Json results_to_json(const std::vector<Prediction>& preds)
{
    Json out = Json::array();
    for (const auto& p : preds) {
        const Rle rle = encode_rle(p.mask);
        out.push_back({{"image_id", p.image_id},
                       {"category_id", 1},
                       {"segmentation", {{"size", {rle.height, rle.width}}, {"counts", rle_to_string(rle)}}},
                       {"score", p.score}});
    }
    return out;
}

std::vector<EvalGroundTruth> ground_truth_for_eval(const Dataset& dataset)
{
    std::vector<EvalGroundTruth> gts;
    for (const auto& inst : dataset.instances) {
        if (!inst.mask)
            continue;
        const auto& image = dataset.image(inst.image_id);
        gts.push_back({inst.id, inst.image_id, decode_mask(*inst.mask, image.width, image.height), inst.area,
                       inst.iscrowd});
    }
    return gts;
}

Json stats_to_json(const OcclusionStats& s)
{
    return {{"images", s.images},
            {"persons", s.persons},
            {"persons_oc050", s.occluded_050},
            {"persons_oc075", s.occluded_075},
            {"average_max_iou", s.average_max_iou}};
}

Json ap_report_to_json(const ApReport& report)
{
    Json bins = Json::array();
    for (const auto& b : report.bins) {
        Json per_t = Json::array();
        for (const auto& v : b.ap_per_threshold)
            per_t.push_back(v ? Json(*v) : Json());
        bins.push_back({{"name", b.name},
                        {"ap", b.ap ? Json(*b.ap) : Json()},
                        {"gt_count", b.gt_count},
                        {"ap_per_threshold", std::move(per_t)},
                        {"max_recall", b.max_recall},
                        {"true_positives", b.true_positives},
                        {"false_negatives", b.false_negatives}});
    }
    return {{"schema_version", kSchemaVersion}, {"iou_thresholds", report.iou_thresholds}, {"bins", std::move(bins)}};
}

void write_tensor(const std::filesystem::path& path, const Image& raster)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::io, "cannot write " + path.string());
    out.write(kTensorMagic, sizeof kTensorMagic);
    put_u32(out, 3);
    put_u32(out, static_cast<std::uint32_t>(raster.channels()));
    put_u32(out, static_cast<std::uint32_t>(raster.height()));
    put_u32(out, static_cast<std::uint32_t>(raster.width()));
    for (float v : raster.data())
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    if (!out)
        throw Error(ErrorCode::io, "failed writing " + path.string());
}

Image read_tensor(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io, "cannot read " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kTensorMagic, sizeof magic) != 0)
        throw Error(ErrorCode::format, path.string() + " is not a tensor file");
    if (get_u32(in) != 3)
        throw Error(ErrorCode::format, "expected a rank-3 tensor");
    const int c = static_cast<int>(get_u32(in));
    const int h = static_cast<int>(get_u32(in));
    const int w = static_cast<int>(get_u32(in));
    const auto header_end = in.tellg();
    in.seekg(0, std::ios::end);
    const auto payload = static_cast<std::uint64_t>(in.tellg() - header_end);
    in.seekg(header_end);
    if (c < 0 || h < 0 || w < 0 ||
        payload != 4ULL * static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(w))
        throw Error(ErrorCode::format, path.string() + ": tensor payload does not match its header");
    Image raster(c, h, w);
    for (float& v : raster.data())
        v = std::bit_cast<float>(get_u32(in));
    return raster;
}

} // namespace pose2seg
