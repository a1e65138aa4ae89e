#include "pose2seg/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "pose2seg/affine_align.hpp"
#include "pose2seg/baseline.hpp"
#include "pose2seg/clustering.hpp"
#include "pose2seg/dataset.hpp"
#include "pose2seg/eval.hpp"
#include "pose2seg/image_io.hpp"
#include "pose2seg/io.hpp"
#include "pose2seg/pipeline.hpp"
#include "pose2seg/skeleton_features.hpp"

namespace fs = std::filesystem;

namespace pose2seg::cli {

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::usage: return usage;
    case ErrorCode::io: return io;
    case ErrorCode::format:
    case ErrorCode::corrupt_mask:
    case ErrorCode::dimension_mismatch: return schema;
    case ErrorCode::reference: return reference;
    default: return data;
    }
}

namespace {

std::shared_ptr<spdlog::logger> logger()
{
    static std::shared_ptr<spdlog::logger> log = [] {
        auto l = std::make_shared<spdlog::logger>("pose2seg", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        const char* env = std::getenv("POSE2SEG_LOG");
        l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        return l;
    }();
    return log;
}

void require_readable(const std::string& path, const char* what)
{
    std::error_code ec;
    if (path.empty() || !fs::is_regular_file(path, ec))
        throw Error(ErrorCode::io, std::string(what) + " '" + path + "' is not a readable file");
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw Error(ErrorCode::io, std::string(what) + " '" + path + "' cannot be opened");
}

void require_writable_file(const std::string& path)
{
    if (path.empty())
        throw Error(ErrorCode::usage, "--output is required");
    const fs::path parent = fs::absolute(path).parent_path();
    std::error_code ec;
    if (!fs::is_directory(parent, ec))
        throw Error(ErrorCode::io, "output directory '" + parent.string() + "' does not exist");
}

void prepare_output_dir(const std::string& path)
{
    if (path.empty())
        throw Error(ErrorCode::usage, "--output is required");
    std::error_code ec;
    if (fs::exists(path, ec) && !fs::is_directory(path, ec))
        throw Error(ErrorCode::io, "'" + path + "' exists and is not a directory");
    if (!fs::is_directory(fs::absolute(path).parent_path(), ec))
        throw Error(ErrorCode::io, "parent of '" + path + "' does not exist");
}

void make_output_dir(const std::string& path)
{
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec)
        throw Error(ErrorCode::io, "cannot create '" + path + "': " + ec.message());
}

std::string text_or_json(const std::string& format, const std::string& table, const Json& doc)
{
    if (format == "table")
        return table;
    return doc.dump(2) + "\n";
}

void emit(const std::string& output, std::ostream& out, const std::string& text)
{
    if (output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(output, std::ios::binary);
    if (!f || !(f << text))
        throw Error(ErrorCode::io, "cannot write " + output);
}

Dataset load_dataset(const std::string& path, Json* document = nullptr)
{
    Json doc = read_json_file(path);
    Dataset ds = parse_annotations(doc);
    for (const auto& issue : ds.issues)
        logger()->info("annotation {}: {}", issue.annotation_id, issue.message);
    if (document != nullptr)
        *document = std::move(doc);
    return ds;
}

MaxIouMode parse_mode(const std::string& mode) { return mode == "mask" ? MaxIouMode::mask : MaxIouMode::bbox; }

const char* mode_name(MaxIouMode m) { return m == MaxIouMode::mask ? "mask" : "bbox"; }

Json metadata(const char* subcommand)
{
    return {{"tool", "pose2seg"}, {"subcommand", subcommand}, {"schema_version", kSchemaVersion}};
}

/// Values from a --config JSON object fill every option not given on the command line.
class ConfigBinder {
public:
    void scope(const CLI::App* sub) { scope_ = sub; }

    template <typename T>
    void bind(CLI::Option* option, std::string key, T& target)
    {
        bindings_.push_back({scope_, option, std::move(key), [&target](const Json& v) { target = v.get<T>(); }});
    }

    void apply(const CLI::App* sub, const std::string& config_path)
    {
        if (config_path.empty())
            return;
        require_readable(config_path, "config");
        const Json cfg = read_json_file(config_path);
        if (!cfg.is_object())
            throw Error(ErrorCode::format, "config file must hold a JSON object");
        // Keys may be global or nested under the subcommand name.
        Json merged = cfg;
        if (cfg.contains(sub->get_name()) && cfg[sub->get_name()].is_object())
            for (const auto& [k, v] : cfg[sub->get_name()].items())
                merged[k] = v;
        for (auto& b : bindings_) {
            if (b.owner != sub || b.option->count() > 0 || !merged.contains(b.key))
                continue;
            try {
                b.assign(merged[b.key]);
            }
            catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::format, "config key '" + b.key + "': " + e.what());
            }
        }
    }

private:
    struct Binding {
        const CLI::App* owner;
        CLI::Option* option;
        std::string key;
        std::function<void(const Json&)> assign;
    };
    std::vector<Binding> bindings_;
    const CLI::App* scope_ = nullptr;
};

struct Options {
    std::string config;
    std::string input;
    std::vector<std::string> inputs;
    std::string output;
    std::string templates;
    std::string image;
    std::string predictions;
    std::string manifest;
    std::string report;
    std::string format = "json";
    std::string maxiou_mode = "bbox";
    std::string bins = "size";
    std::string align = "pose";
    long long image_id = -1;
    int size = kDefaultAlignSize;
    int k = 3;
    std::uint64_t seed = 0;
    int max_iter = 300;
    double threshold = 0.5;
    double expand = 0.0;
    double val_fraction = 0.5;
    double sigma = 0.0;
    double limb_width = 0.0;
    int dilation = 3;
    bool include_crowd = false;
    bool include_small = false;
    bool previews = false;
    bool sweep = false;
    std::vector<int> units{5, 10, 15, 20};
    int residual_convs = kBottleneckConvCount;
    int residual_kernel = kBottleneckKernel;
};

void check_ranges(const Options& o)
{
    if (o.size < 4 || o.size > 4096)
        throw Error(ErrorCode::usage, "--size must lie in [4, 4096]");
    if (o.k < 1)
        throw Error(ErrorCode::usage, "--k must be at least 1");
    if (o.max_iter < 1)
        throw Error(ErrorCode::usage, "--max-iter must be at least 1");
    if (!(o.threshold >= 0.0 && o.threshold <= 1.0))
        throw Error(ErrorCode::usage, "--threshold must lie in [0, 1]");
    if (!(o.expand >= 0.0))
        throw Error(ErrorCode::usage, "--expand must be non-negative");
    if (!(o.val_fraction >= 0.0 && o.val_fraction <= 1.0))
        throw Error(ErrorCode::usage, "--val-fraction must lie in [0, 1]");
    if (o.dilation < 0)
        throw Error(ErrorCode::usage, "--dilation must be non-negative");
    if (o.format != "json" && o.format != "table")
        throw Error(ErrorCode::usage, "--format must be json or table");
    if (o.maxiou_mode != "bbox" && o.maxiou_mode != "mask")
        throw Error(ErrorCode::usage, "--maxiou-mode must be bbox or mask");
}

PipelineOptions pipeline_options(const Options& o)
{
    PipelineOptions p;
    p.size = o.size;
    p.skeleton.sigma = o.sigma;
    p.skeleton.limb_width = o.limb_width;
    p.baseline.dilation_radius = o.dilation;
    return p;
}

// ---------------------------------------------------------------- subcommands

void cmd_cluster(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    require_writable_file(o.output);
    const Dataset ds = load_dataset(o.input);

    std::vector<Pose> poses;
    std::size_t skipped = 0;
    for (const auto& inst : ds.instances) {
        if (inst.iscrowd || !inst.keypoints)
            continue;
        if (!(inst.bbox.w > 0.0 && inst.bbox.h > 0.0)) {
            ++skipped;
            continue;
        }
        poses.push_back(normalize_pose(*inst.keypoints, inst.bbox));
    }
    if (skipped != 0)
        logger()->info("{} instances skipped for a degenerate bbox", skipped);

    const ClusteringResult result = kmeans_templates(poses, {o.k, o.seed, o.max_iter});
    Json doc = template_bank_to_json(result.templates);
    doc["clustering"] = {{"seed", o.seed},
                         {"poses_used", result.used.size()},
                         {"objective", result.objective},
                         {"iterations", result.iterations},
                         {"converged", result.converged},
                         {"unusable_templates", result.unusable_templates}};
    doc["metadata"] = metadata("cluster");
    write_json_file(o.output, doc);
    out << "wrote " << result.templates.size() << " templates from " << result.used.size() << " poses to "
        << o.output << "\n";
}

std::vector<PoseTemplate> load_bank(const std::string& path)
{
    require_readable(path, "templates");
    return template_bank_from_json(read_json_file(path));
}

void cmd_align(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    require_readable(o.image, "image");
    prepare_output_dir(o.output);
    const auto bank = load_bank(o.templates);
    const Dataset ds = load_dataset(o.input);

    const ImageInfo* info = nullptr;
    if (o.image_id >= 0) {
        info = &ds.image(o.image_id);
    }
    else {
        const std::string name = fs::path(o.image).filename().string();
        for (const auto& im : ds.images)
            if (fs::path(im.file_name).filename().string() == name)
                info = &im;
        if (info == nullptr)
            throw Error(ErrorCode::reference, "no image in the annotations is named '" + name + "'; pass --image-id");
    }
    const Image image = read_image(o.image);
    if (image.width() != info->width || image.height() != info->height)
        throw Error(ErrorCode::dimension_mismatch, "image size differs from its annotation record");

    make_output_dir(o.output);
    int written = 0;
    for (const auto& inst : ds.instances) {
        if (inst.image_id != info->id || inst.iscrowd || !inst.keypoints)
            continue;
        const AlignTransform t = select_template(*inst.keypoints, bank, o.size);
        const AlignedWindow window = warp_window(image, t, o.size, info->id);
        const std::string stem = std::to_string(inst.id);
        write_image(fs::path(o.output) / (stem + ".png"), window.pixels);
        Json sidecar = transform_to_json(t);
        sidecar["annotation_id"] = inst.id;
        sidecar["image_id"] = info->id;
        sidecar["size"] = o.size;
        write_json_file(fs::path(o.output) / (stem + ".json"), sidecar);
        ++written;
    }
    out << "aligned " << written << " instances into " << o.output << "\n";
}

void cmd_skeleton(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    prepare_output_dir(o.output);
    const auto bank = load_bank(o.templates);
    const Dataset ds = load_dataset(o.input);
    if (o.image_id >= 0)
        (void)ds.image(o.image_id);

    make_output_dir(o.output);
    SkeletonOptions so{o.sigma, o.limb_width};
    int written = 0;
    for (const auto& inst : ds.instances) {
        if ((o.image_id >= 0 && inst.image_id != o.image_id) || inst.iscrowd || !inst.keypoints)
            continue;
        const AlignTransform t = select_template(*inst.keypoints, bank, o.size);
        const Image features = skeleton_features(transform_pose(*inst.keypoints, t.matrix, o.size), o.size, so);
        const std::string stem = std::to_string(inst.id);
        write_tensor(fs::path(o.output) / (stem + ".p2st"), features);
        if (o.previews) {
            for (int c = 0; c < features.channels(); ++c) {
                std::ostringstream name;
                name << stem << "_c" << std::setw(2) << std::setfill('0') << c << ".png";
                const bool paf = c >= kConfidenceChannels;
                write_channel_preview(fs::path(o.output) / name.str(), features, c, paf ? -1.0F : 0.0F, 1.0F);
            }
        }
        ++written;
    }
    out << "rasterized " << written << " instances into " << o.output << "\n";
}

void cmd_stats(const Options& o, std::ostream& out)
{
    std::vector<std::string> inputs = o.inputs;
    if (inputs.empty() && !o.input.empty())
        inputs.push_back(o.input);
    if (inputs.empty())
        throw Error(ErrorCode::usage, "--input is required");
    for (const auto& in : inputs)
        require_readable(in, "input");
    if (!o.output.empty())
        require_writable_file(o.output);

    const OcclusionOptions occ{parse_mode(o.maxiou_mode), o.include_crowd};
    std::vector<std::pair<std::string, OcclusionStats>> columns;
    Json datasets = Json::array();
    for (const auto& in : inputs) {
        const Dataset ds = load_dataset(in);
        const auto stats = summarize(occlusion_records(ds, occ));
        const std::string name = fs::path(in).stem().string();
        columns.emplace_back(name, stats);
        Json entry = stats_to_json(stats);
        entry["name"] = name;
        datasets.push_back(std::move(entry));
    }
    Json doc{{"schema_version", kSchemaVersion},
             {"maxiou_mode", mode_name(occ.mode)},
             {"include_crowd", occ.include_crowd},
             {"datasets", std::move(datasets)},
             {"metadata", metadata("stats")}};
    emit(o.output, out, text_or_json(o.format, format_stats_table(columns), doc));
}

void cmd_filter(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    require_writable_file(o.output);
    if (!o.report.empty())
        require_writable_file(o.report);

    Json original;
    const Dataset ds = load_dataset(o.input, &original);
    const OcclusionOptions occ{parse_mode(o.maxiou_mode), o.include_crowd};
    const FilterResult fr = filter_occluded(ds, o.threshold, occ);

    write_json_file(o.output, subset_document(original, fr.subset));
    Json report{{"schema_version", kSchemaVersion},
                {"threshold", o.threshold},
                {"maxiou_mode", mode_name(occ.mode)},
                {"input", stats_to_json(fr.input_stats)},
                {"retained", stats_to_json(fr.subset_stats)},
                {"metadata", metadata("filter")}};
    const std::string table = format_stats_table({{"input", fr.input_stats}, {"retained", fr.subset_stats}});
    emit(o.report, out, text_or_json(o.format, table, report));
}

void cmd_split(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    if (!o.manifest.empty())
        require_readable(o.manifest, "manifest");
    prepare_output_dir(o.output);

    Json original;
    const Dataset ds = load_dataset(o.input, &original);
    Split split;
    if (!o.manifest.empty()) {
        const Json m = read_json_file(o.manifest);
        if (!m.is_object() || !m.contains("val") || !m.contains("test") || !m["val"].is_array() ||
            !m["test"].is_array())
            throw Error(ErrorCode::format, "split manifest must hold 'val' and 'test' id arrays");
        try {
            split = split_from_manifest(ds, m["val"].get<std::vector<long long>>(),
                                        m["test"].get<std::vector<long long>>());
        }
        catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::format, std::string("split manifest: ") + e.what());
        }
    }
    else {
        split = split_dataset(ds, o.seed, o.val_fraction);
    }

    make_output_dir(o.output);
    write_json_file(fs::path(o.output) / "val.json", subset_document(original, split.val));
    write_json_file(fs::path(o.output) / "test.json", subset_document(original, split.test));

    Json ids_val = Json::array(), ids_test = Json::array();
    for (const auto& im : split.val.images)
        ids_val.push_back(im.id);
    for (const auto& im : split.test.images)
        ids_test.push_back(im.id);
    write_json_file(fs::path(o.output) / "manifest.json",
                    {{"schema_version", kSchemaVersion}, {"val", ids_val}, {"test", ids_test}});

    Json summary{{"schema_version", kSchemaVersion},
                 {"val", {{"images", split.val.images.size()}, {"instances", split.val.instances.size()}}},
                 {"test", {{"images", split.test.images.size()}, {"instances", split.test.instances.size()}}},
                 {"metadata", metadata("split")}};
    std::ostringstream table;
    table << "split  images  instances\n"
          << "val    " << std::setw(6) << split.val.images.size() << "  " << std::setw(9)
          << split.val.instances.size() << "\n"
          << "test   " << std::setw(6) << split.test.images.size() << "  " << std::setw(9)
          << split.test.instances.size() << "\n";
    out << text_or_json(o.format, table.str(), summary);
}

void cmd_segment(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    require_writable_file(o.output);
    if (o.align != "pose" && o.align != "kpt-bbox")
        throw Error(ErrorCode::usage, "--align must be pose or kpt-bbox");
    const AlignMode mode = o.align == "pose" ? AlignMode::pose : AlignMode::keypoint_bbox;
    const std::vector<PoseTemplate> bank = mode == AlignMode::pose ? load_bank(o.templates) : std::vector<PoseTemplate>{};
    const Dataset ds = load_dataset(o.input);

    const auto preds = segment_dataset(ds, bank, pipeline_options(o), mode, o.expand);
    write_json_file(o.output, results_to_json(preds));
    out << "segmented " << preds.size() << " instances into " << o.output << "\n";
}

void cmd_evaluate(const Options& o, std::ostream& out)
{
    require_readable(o.input, "input");
    if (!o.sweep)
        require_readable(o.predictions, "predictions");
    if (!o.output.empty())
        require_writable_file(o.output);
    if (o.bins != "size" && o.bins != "occlusion")
        throw Error(ErrorCode::usage, "--bins must be size or occlusion");

    const Dataset ds = load_dataset(o.input);
    EvalParams params;
    if (o.bins == "occlusion") {
        params.bins = occlusion_bins(occlusion_records(ds, {parse_mode(o.maxiou_mode), o.include_crowd}));
    }
    else {
        params.bins = size_bins();
        params.exclude_small = !o.include_small;
    }

    if (o.sweep) {
        const auto rows = box_alignment_sweep(ds, pipeline_options(o), params);
        Json list = Json::array();
        std::ostringstream table;
        for (const auto& row : rows) {
            Json r = ap_report_to_json(row.report);
            r["expand"] = row.expand;
            list.push_back(std::move(r));
            std::ostringstream label;
            label << "kpt-bbox +" << static_cast<int>(std::lround(row.expand * 100)) << "%";
            const std::string t = format_ap_table(label.str(), row.report);
            table << (row.expand == rows.front().expand ? t : t.substr(t.find('\n') + 1));
        }
        Json doc{{"schema_version", kSchemaVersion}, {"bins", o.bins}, {"sweep", std::move(list)},
                 {"metadata", metadata("evaluate")}};
        emit(o.output, out, text_or_json(o.format, table.str(), doc));
        return;
    }

    const auto preds = parse_results(read_json_file(o.predictions), ds);
    const ApReport report = average_precision(preds, ground_truth_for_eval(ds), params);
    Json doc = ap_report_to_json(report);
    doc["bins_kind"] = o.bins;
    doc["exclude_small"] = params.exclude_small;
    doc["metadata"] = metadata("evaluate");
    emit(o.output, out, text_or_json(o.format, format_ap_table(fs::path(o.predictions).stem().string(), report), doc));
}

void cmd_rf(const Options& o, std::ostream& out)
{
    if (o.units.empty())
        throw Error(ErrorCode::usage, "--units needs at least one value");
    Json rows = Json::array();
    std::ostringstream table;
    table << "residual units  receptive field\n";
    for (int n : o.units) {
        if (n < 0)
            throw Error(ErrorCode::usage, "--units values must be non-negative");
        const double rf = receptive_field(segmodule_layers(n), o.residual_convs, o.residual_kernel);
        rows.push_back({{"units", n}, {"receptive_field", rf}});
        table << std::setw(14) << n << "  " << std::setw(15) << rf << "\n";
    }
    Json doc{{"schema_version", kSchemaVersion},
             {"stem", {{"kernel", 7}, {"stride", 2}}},
             {"residual_conv_count", o.residual_convs},
             {"residual_kernel", o.residual_kernel},
             {"rows", std::move(rows)},
             {"metadata", metadata("rf")}};
    emit(o.output, out, text_or_json(o.format, table.str(), doc));
}

void print_error(std::ostream& err, const char* code, int exit_code, const std::string& message)
{
    err << Json{{"error", {{"code", code}, {"exit_code", exit_code}, {"message", message}}}}.dump() << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pose-based human instance segmentation toolkit"};
    app.require_subcommand(1, 1);
    Options o;
    ConfigBinder binder;

    auto add_common = [&](CLI::App* sub) {
        binder.scope(sub);
        sub->add_option("--config", o.config, "JSON config; command-line flags take precedence");
    };
    auto add_input = [&](CLI::App* sub) { binder.bind(sub->add_option("--input", o.input, "COCO annotation file"), "input", o.input); };
    auto add_output = [&](CLI::App* sub, const char* help) {
        binder.bind(sub->add_option("--output", o.output, help), "output", o.output);
    };
    auto add_format = [&](CLI::App* sub) {
        binder.bind(sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"})),
                    "format", o.format);
    };
    auto add_size = [&](CLI::App* sub) { binder.bind(sub->add_option("--size", o.size, "alignment window size"), "size", o.size); };
    auto add_templates = [&](CLI::App* sub) {
        binder.bind(sub->add_option("--templates", o.templates, "template bank JSON"), "templates", o.templates);
    };
    auto add_mode = [&](CLI::App* sub) {
        binder.bind(sub->add_option("--maxiou-mode", o.maxiou_mode, "bbox or mask")->check(CLI::IsMember({"bbox", "mask"})),
                    "maxiou_mode", o.maxiou_mode);
        binder.bind(sub->add_flag("--include-crowd", o.include_crowd, "count crowd regions as persons"), "include_crowd",
                    o.include_crowd);
    };
    auto add_skeleton = [&](CLI::App* sub) {
        binder.bind(sub->add_option("--sigma", o.sigma, "confidence map sigma in pixels (default 0.06*S)"), "sigma", o.sigma);
        binder.bind(sub->add_option("--limb-width", o.limb_width, "PAF half width in pixels (default 0.03*S)"), "limb_width",
                    o.limb_width);
    };

    auto* cluster = app.add_subcommand("cluster", "cluster training poses into a template bank");
    add_common(cluster);
    add_input(cluster);
    add_output(cluster, "template bank JSON to write");
    binder.bind(cluster->add_option("--k", o.k, "number of templates"), "k", o.k);
    binder.bind(cluster->add_option("--seed", o.seed, "k-means++ seed"), "seed", o.seed);
    binder.bind(cluster->add_option("--max-iter", o.max_iter, "Lloyd iteration cap"), "max_iter", o.max_iter);

    auto* align = app.add_subcommand("align", "warp every person of an image into aligned windows");
    add_common(align);
    add_input(align);
    add_output(align, "directory for crops and sidecars");
    add_templates(align);
    add_size(align);
    binder.bind(align->add_option("--image", o.image, "image file"), "image", o.image);
    binder.bind(align->add_option("--image-id", o.image_id, "image id (default: match by file name)"), "image_id", o.image_id);

    auto* skeleton = app.add_subcommand("skeleton", "rasterize 55-channel skeleton features per person");
    add_common(skeleton);
    add_input(skeleton);
    add_output(skeleton, "directory for tensor files");
    add_templates(skeleton);
    add_size(skeleton);
    add_skeleton(skeleton);
    binder.bind(skeleton->add_option("--image-id", o.image_id, "restrict to one image"), "image_id", o.image_id);
    binder.bind(skeleton->add_flag("--previews", o.previews, "also write per-channel PNG previews"), "previews", o.previews);

    auto* stats = app.add_subcommand("stats", "MaxIoU occlusion statistics");
    add_common(stats);
    binder.bind(stats->add_option("--input", o.inputs, "COCO annotation file(s)"), "input", o.inputs);
    add_output(stats, "report file (default stdout)");
    add_format(stats);
    add_mode(stats);

    auto* filter = app.add_subcommand("filter", "keep heavily occluded persons");
    add_common(filter);
    add_input(filter);
    add_output(filter, "filtered COCO annotation file");
    add_format(filter);
    add_mode(filter);
    binder.bind(filter->add_option("--threshold", o.threshold, "keep MaxIoU > threshold"), "threshold", o.threshold);
    binder.bind(filter->add_option("--report", o.report, "stats report file (default stdout)"), "report", o.report);

    auto* split = app.add_subcommand("split", "image-level val/test split");
    add_common(split);
    add_input(split);
    add_output(split, "directory for val.json, test.json and manifest.json");
    add_format(split);
    binder.bind(split->add_option("--seed", o.seed, "shuffle seed"), "seed", o.seed);
    binder.bind(split->add_option("--val-fraction", o.val_fraction, "fraction of images in val"), "val_fraction",
                o.val_fraction);
    binder.bind(split->add_option("--manifest", o.manifest, "replay a split manifest instead"), "manifest", o.manifest);

    auto* segment = app.add_subcommand("segment", "ground-truth poses -> masks with the baseline segmenter");
    add_common(segment);
    add_input(segment);
    add_output(segment, "COCO results JSON");
    add_templates(segment);
    add_size(segment);
    add_skeleton(segment);
    binder.bind(segment->add_option("--align", o.align, "pose or kpt-bbox")->check(CLI::IsMember({"pose", "kpt-bbox"})),
                "align", o.align);
    binder.bind(segment->add_option("--expand", o.expand, "box growth for kpt-bbox"), "expand", o.expand);
    binder.bind(segment->add_option("--dilation", o.dilation, "baseline dilation radius"), "dilation", o.dilation);

    auto* evaluate = app.add_subcommand("evaluate", "mask AP with size or occlusion bins");
    add_common(evaluate);
    add_input(evaluate);
    add_output(evaluate, "report file (default stdout)");
    add_format(evaluate);
    add_mode(evaluate);
    add_size(evaluate);
    add_skeleton(evaluate);
    binder.bind(evaluate->add_option("--predictions", o.predictions, "COCO results JSON"), "predictions", o.predictions);
    binder.bind(evaluate->add_option("--bins", o.bins, "size or occlusion")->check(CLI::IsMember({"size", "occlusion"})),
                "bins", o.bins);
    binder.bind(evaluate->add_flag("--include-small", o.include_small, "keep persons under 32^2 px"), "include_small",
                o.include_small);
    binder.bind(evaluate->add_flag("--sweep", o.sweep, "evaluate the keypoint-box alignment over the expand grid"),
                "sweep", o.sweep);
    binder.bind(evaluate->add_option("--dilation", o.dilation, "baseline dilation radius (sweep)"), "dilation", o.dilation);

    auto* rf = app.add_subcommand("rf", "receptive field of the segmentation stack");
    add_common(rf);
    add_output(rf, "report file (default stdout)");
    add_format(rf);
    binder.bind(rf->add_option("--units", o.units, "residual unit counts"), "units", o.units);
    binder.bind(rf->add_option("--residual-convs", o.residual_convs, "field-widening convs per unit"), "residual_convs",
                o.residual_convs);
    binder.bind(rf->add_option("--residual-kernel", o.residual_kernel, "kernel of those convs"), "residual_kernel",
                o.residual_kernel);

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e) {
        print_error(err, "usage", usage, e.what());
        return usage;
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        binder.apply(sub, o.config);
        check_ranges(o);
        const std::string name = sub->get_name();
        const std::map<std::string, std::function<void(const Options&, std::ostream&)>> table{
            {"cluster", cmd_cluster}, {"align", cmd_align},     {"skeleton", cmd_skeleton},
            {"stats", cmd_stats},     {"filter", cmd_filter},   {"split", cmd_split},
            {"segment", cmd_segment}, {"evaluate", cmd_evaluate}, {"rf", cmd_rf},
        };
        table.at(name)(o, out);
        return ok;
    }
    catch (const Error& e) {
        const int code = exit_code_for(e.code());
        print_error(err, std::string(to_string(e.code())).c_str(), code, e.what());
        return code;
    }
    catch (const std::exception& e) {
        print_error(err, "internal", internal, e.what());
        return internal;
    }
}

} // namespace pose2seg::cli
