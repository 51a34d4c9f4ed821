#include "fingercount/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "fingercount/pipeline.hpp"
#include "fingercount/raster.hpp"

namespace fingercount {

namespace {

namespace fs = std::filesystem;

/// Bad flags or unreadable/unwritable user files: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixed1(double v) {
    double r = std::round(v * 10) / 10;
    if (r == 0) r = 0;  // never print "-0.0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", r);
    return buf;
}

AnyImage load_input(const std::string& path) {
    std::error_code ec;
    if (!fs::exists(path, ec) || fs::is_directory(path, ec)) {
        throw UsageError("cannot read file: " + path);
    }
    try {
        return read_pnm_file(path);
    } catch (const PnmParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

GrayImage as_gray(AnyImage any) {
    if (auto* g = std::get_if<GrayImage>(&any)) return std::move(*g);
    if (auto* c = std::get_if<ColorImage>(&any)) return to_grayscale(*c);
    const auto& b = std::get<BinaryImage>(any);
    GrayImage g = GrayImage::blank(b.width, b.height);
    for (std::size_t i = 0; i < b.data.size(); ++i) g.data[i] = b.data[i] ? 255 : 0;
    return g;
}

BinaryImage load_mask(const std::string& path, bool invert) {
    AnyImage any = load_input(path);
    auto* mask = std::get_if<BinaryImage>(&any);
    if (!mask) throw UsageError("mask must be a P4 bitmap: " + path);
    if (invert) {
        for (auto& v : mask->data) v ^= 1;
    }
    return std::move(*mask);
}

struct InputOpts {
    std::string bg;
    std::string frame;
    std::string mask;
    bool invert_pbm = false;
};

struct Detected {
    DetectionResult result;
    BinaryImage base;  // the binary image the detection ran on
};

Detected detect(const InputOpts& in, const PipelineConfig& cfg) {
    if (!in.mask.empty()) {
        // pre-binarized masks feed the segmenter directly
        BinaryImage mask = load_mask(in.mask, in.invert_pbm);
        Detected d{count_fingers(mask, cfg.scan), std::move(mask)};
        return d;
    }
    if (in.bg.empty() || in.frame.empty()) {
        throw UsageError("provide either --mask, or both --bg and --frame");
    }
    const GrayImage bg = as_gray(load_input(in.bg));
    const GrayImage frame = as_gray(load_input(in.frame));
    PipelineResult res = process_frame(bg, frame, cfg);
    BinaryImage base = res.detection.root.image;
    return {std::move(res.detection), std::move(base)};
}

void collect_leaves(const SegmentNode& node, std::vector<const SegmentNode*>& out) {
    if (node.children.empty()) {
        out.push_back(&node);
        return;
    }
    for (const SegmentNode& child : node.children) collect_leaves(child, out);
}

const char* verdict_name(LeafVerdict v) {
    switch (v) {
        case LeafVerdict::finger: return "finger";
        case LeafVerdict::rejected_area: return "rejected_area";
        case LeafVerdict::rejected_ratio: return "rejected_ratio";
        case LeafVerdict::internal: return "internal";
    }
    return "internal";
}

int cmd_count(const InputOpts& in, const PipelineConfig& cfg, bool json, std::ostream& out) {
    const Detected d = detect(in, cfg);
    if (json) {
        nlohmann::json leaves = nlohmann::json::array();
        std::vector<const SegmentNode*> nodes;
        collect_leaves(d.result.root, nodes);
        for (const SegmentNode* leaf : nodes) {
            leaves.push_back({{"verdict", verdict_name(leaf->verdict)},
                              {"area", count_white(leaf->image)}});
        }
        nlohmann::json j{{"count", d.result.finger_count},
                         {"orientation_deg", d.result.orientation_deg},
                         {"leaves", leaves}};
        out << j.dump() << "\n";
    } else {
        out << "count=" << d.result.finger_count
            << " orientation_deg=" << fixed1(d.result.orientation_deg) << "\n";
    }
    return 0;
}

int cmd_annotate(const InputOpts& in, const PipelineConfig& cfg, const std::string& out_path) {
    const Detected d = detect(in, cfg);
    const ColorImage image = annotate(d.result, d.base);
    try {
        write_bytes_file(out_path, encode_pnm(image));
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return 0;
}

int cmd_synth(int count, double orientation, bool seeded, std::uint64_t seed,
              const std::string& out_path) {
    BinaryImage mask;
    try {
        mask = seeded ? randomized_mask(seed, count, orientation)
                      : canonical_mask(count, orientation);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    try {
        write_bytes_file(out_path, encode_pnm(mask));
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return 0;
}

int cmd_corpus(const CorpusParams& params, const std::string& out_dir,
               std::string manifest_path, std::ostream& out) {
    if (manifest_path.empty()) manifest_path = (fs::path(out_dir) / "manifest.csv").string();
    CorpusManifest manifest;
    try {
        manifest = gen_corpus(params, out_dir);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const fs::path manifest_dir = fs::path(manifest_path).parent_path();
    if (!manifest_dir.empty() && fs::absolute(manifest_dir) != fs::absolute(out_dir)) {
        for (CorpusEntry& e : manifest.entries) {
            const fs::path rel =
                fs::absolute(fs::path(out_dir) / e.path).lexically_relative(fs::absolute(manifest_dir));
            e.path = rel.empty() ? (fs::path(out_dir) / e.path).string() : rel.string();
        }
    }
    try {
        write_manifest_csv(manifest, manifest_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    out << "wrote " << manifest.entries.size() << " masks to " << out_dir << " (manifest "
        << manifest_path << ")\n";
    return 0;
}

int cmd_eval(const std::string& manifest_path, const ScanParams& scan, bool denoise_first,
             bool csv, std::ostream& out) {
    CorpusManifest manifest;
    try {
        manifest = read_manifest_csv(manifest_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const fs::path base_dir = fs::path(manifest_path).parent_path();
    const EvalReport report = evaluate_manifest(manifest, base_dir, scan, denoise_first);

    char line[256];
    if (csv) {
        out << "count,files,correct,accuracy_pct\n";
        for (const EvalRow& row : report.rows) {
            std::snprintf(line, sizeof line, "%d,%d,%d,%.2f\n", row.count, row.files,
                          row.correct, row.accuracy_pct);
            out << line;
        }
        std::snprintf(line, sizeof line, "overall,%d,%d,%.2f\n", report.total_files,
                      report.total_correct, report.overall_pct);
        out << line;
    } else {
        out << "count  files  correct  accuracy\n";
        for (const EvalRow& row : report.rows) {
            std::snprintf(line, sizeof line, "%5d  %5d  %7d  %8.2f\n", row.count, row.files,
                          row.correct, row.accuracy_pct);
            out << line;
        }
        std::snprintf(line, sizeof line, "overall  %3d  %7d  %8.2f\n", report.total_files,
                      report.total_correct, report.overall_pct);
        out << line;
        for (const EvalFailure& f : report.failures) {
            out << "failed: " << f.path << " expected=" << f.expected;
            if (f.error.empty()) {
                out << " got=" << f.got << "\n";
            } else {
                out << " error=" << f.error << "\n";
            }
        }
    }
    return 0;
}

struct BenchInputs {
    GrayImage background;
    GrayImage frame;
};

BenchInputs synthetic_bench_frame() {
    HandSpec spec = scale_spec(canonical_hand_spec(5), 3);
    spec.canvas_width = 640;
    spec.canvas_height = 480;
    spec.palm_center = {320, 318};
    const BinaryImage mask = gen_hand_mask(spec);
    BenchInputs in;
    in.background = GrayImage::blank(640, 480, 0);
    in.frame = GrayImage::blank(640, 480, 0);
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (mask.data[i]) in.frame.data[i] = 255;
    }
    return in;
}

int cmd_bench(const InputOpts& in, const PipelineConfig& cfg, int iters, std::ostream& out) {
    BenchInputs bench;
    if (!in.bg.empty() && !in.frame.empty()) {
        bench.background = as_gray(load_input(in.bg));
        bench.frame = as_gray(load_input(in.frame));
    } else if (in.bg.empty() && in.frame.empty()) {
        bench = synthetic_bench_frame();
    } else {
        throw UsageError("bench needs both --bg and --frame, or neither (synthetic)");
    }

    constexpr int kStages = 5;
    const char* names[kStages] = {"blur", "subtract", "denoise", "downsample", "segment"};
    std::vector<double> samples[kStages];

    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    for (int i = 0; i < iters; ++i) {
        auto t = clock::now();
        const GrayImage blurred = gaussian_blur_5x5(bench.background);
        samples[0].push_back(ms_since(t));

        t = clock::now();
        const BinaryImage raw = background_subtract(bench.frame, blurred, cfg.bg_threshold);
        samples[1].push_back(ms_since(t));

        t = clock::now();
        const BinaryImage clean = denoise_7of9(raw);
        samples[2].push_back(ms_since(t));

        t = clock::now();
        const BinaryImage small = downsample(clean, cfg.downsample_factor);
        samples[3].push_back(ms_since(t));

        t = clock::now();
        (void)count_fingers(small, cfg.scan);
        samples[4].push_back(ms_since(t));
    }

    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        const std::size_t idx =
            std::min(v.size() - 1, static_cast<std::size_t>(std::ceil(q * v.size())) -
                                       (q > 0 ? 1 : 0));
        return v[idx];
    };
    out << "stage        median_ms     p95_ms\n";
    char line[128];
    for (int s = 0; s < kStages; ++s) {
        std::snprintf(line, sizeof line, "%-12s %9.3f  %9.3f\n", names[s],
                      quantile(samples[s], 0.5), quantile(samples[s], 0.95));
        out << line;
    }
    return 0;
}

void add_scan_flags(CLI::App* cmd, ScanParams& scan) {
    cmd->add_option("--min-white-run", scan.min_white_run, "minimum finger crossing width (px)");
    cmd->add_option("--min-black-run", scan.min_black_run, "minimum gap width (px)");
    cmd->add_option("--hw-ratio", scan.hw_ratio, "height/width ratio for the finger test");
    cmd->add_option("--angle-step", scan.angle_step_deg, "split-line angle step (deg)");
    cmd->add_option("--lift-offset", scan.lift_offset, "child anchor lift (rows)");
    cmd->add_option("--max-depth", scan.max_depth, "recursion guard");
}

void add_pipeline_flags(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--threshold", cfg.bg_threshold, "background difference threshold")
        ->check(CLI::Range(1, 255));
    cmd->add_option("--downsample", cfg.downsample_factor, "spatial sampling factor")
        ->check(CLI::Range(1, 64));
    cmd->add_flag("--blur-frame", cfg.blur_frame, "blur incoming frames as well");
    add_scan_flags(cmd, cfg.scan);
}

void add_input_flags(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--bg", in.bg, "background frame (PNM)");
    cmd->add_option("--frame", in.frame, "frame to analyze (PNM)");
    cmd->add_option("--mask", in.mask, "pre-binarized mask (P4), bypasses extraction");
    cmd->add_flag("--invert-pbm", in.invert_pbm, "flip PBM polarity on mask input");
}

}  // namespace

EvalReport evaluate_manifest(const CorpusManifest& manifest, const fs::path& base_dir,
                             const ScanParams& params, bool denoise_first) {
    params.validate();
    for (const CorpusEntry& e : manifest.entries) {
        const fs::path p = base_dir / e.path;
        std::error_code ec;
        if (!fs::exists(p, ec)) {
            throw std::runtime_error("missing mask file: " + p.string());
        }
    }

    EvalReport report;
    std::map<int, std::pair<int, int>> tally;  // count -> (files, correct)
    for (const CorpusEntry& e : manifest.entries) {
        const fs::path p = base_dir / e.path;
        int got = -1;
        std::string error;
        try {
            AnyImage any = read_pnm_file(p.string());
            auto* loaded = std::get_if<BinaryImage>(&any);
            if (!loaded) throw std::runtime_error("mask is not a P4 bitmap");
            const BinaryImage mask = denoise_first ? denoise_7of9(*loaded) : std::move(*loaded);
            got = count_fingers(mask, params).finger_count;
        } catch (const std::exception& ex) {
            error = ex.what();
        }
        const bool correct = error.empty() && got == e.expected_count;
        auto& [files, right] = tally[e.expected_count];
        ++files;
        if (correct) {
            ++right;
        } else {
            report.failures.push_back({e.path, e.expected_count, got, error});
        }
    }
    for (const auto& [count, counts] : tally) {
        const auto [files, right] = counts;
        report.rows.push_back({count, files, right, 100.0 * right / files});
        report.total_files += files;
        report.total_correct += right;
    }
    report.overall_pct =
        report.total_files ? 100.0 * report.total_correct / report.total_files : 0.0;
    std::sort(report.failures.begin(), report.failures.end(),
              [](const EvalFailure& a, const EvalFailure& b) {
                  return a.expected != b.expected ? a.expected < b.expected : a.path < b.path;
              });
    return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"finger counting on binary hand masks via recursive valley splitting"};
    app.require_subcommand(1);

    InputOpts count_in;
    PipelineConfig count_cfg;
    bool count_json = false;
    CLI::App* count_cmd = app.add_subcommand("count", "count fingers in a frame or mask");
    add_input_flags(count_cmd, count_in);
    add_pipeline_flags(count_cmd, count_cfg);
    count_cmd->add_flag("--json", count_json, "emit a JSON object instead of plain text");

    InputOpts annotate_in;
    PipelineConfig annotate_cfg;
    std::string annotate_out;
    CLI::App* annotate_cmd =
        app.add_subcommand("annotate", "render base/split lines and valley points");
    add_input_flags(annotate_cmd, annotate_in);
    add_pipeline_flags(annotate_cmd, annotate_cfg);
    annotate_cmd->add_option("--out", annotate_out, "output PPM path")->required();

    int synth_count = 5;
    double synth_orientation = 0;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    CLI::App* synth_cmd = app.add_subcommand("synth", "write one synthetic hand mask (P4)");
    synth_cmd->add_option("--count", synth_count, "fingers, 0-10 (above 5 uses two hands)")
        ->check(CLI::Range(0, 10));
    synth_cmd->add_option("--orientation", synth_orientation, "degrees from vertical")
        ->check(CLI::Range(-45.0, 45.0));
    CLI::Option* synth_seed_opt =
        synth_cmd->add_option("--seed", synth_seed, "randomize geometry from this seed");
    synth_cmd->add_option("--out", synth_out, "output PBM path")->required();

    CorpusParams corpus_params;
    std::string corpus_out;
    std::string corpus_manifest;
    CLI::App* corpus_cmd = app.add_subcommand("corpus", "write a seeded mask corpus + manifest");
    corpus_cmd->add_option("--n", corpus_params.size, "number of masks")->check(CLI::Range(1, 100000));
    corpus_cmd->add_option("--seed", corpus_params.seed, "corpus seed");
    corpus_cmd->add_option("--count-min", corpus_params.count_min)->check(CLI::Range(0, 10));
    corpus_cmd->add_option("--count-max", corpus_params.count_max)->check(CLI::Range(0, 10));
    corpus_cmd->add_option("--orient-max", corpus_params.orientation_max_deg,
                           "orientations drawn uniformly in +- this")
        ->check(CLI::Range(0.0, 45.0));
    corpus_cmd->add_option("--noise", corpus_params.noise_density, "salt noise density")
        ->check(CLI::Range(0.0, 0.05));
    corpus_cmd->add_option("--out", corpus_out, "output directory")->required();
    corpus_cmd->add_option("--manifest", corpus_manifest, "manifest path (default <out>/manifest.csv)");

    std::string eval_manifest;
    ScanParams eval_scan;
    bool eval_csv = false;
    bool eval_denoise = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy report over a mask corpus");
    eval_cmd->add_option("--manifest", eval_manifest, "manifest CSV")->required();
    eval_cmd->add_flag("--csv", eval_csv, "machine-readable rows");
    eval_cmd->add_flag("--denoise", eval_denoise, "run denoise_7of9 on each mask first");
    add_scan_flags(eval_cmd, eval_scan);

    InputOpts bench_in;
    PipelineConfig bench_cfg;
    int bench_iters = 10;
    CLI::App* bench_cmd = app.add_subcommand("bench", "per-stage wall times");
    bench_cmd->add_option("--bg", bench_in.bg, "background frame (PNM)");
    bench_cmd->add_option("--frame", bench_in.frame, "frame to analyze (PNM)");
    bench_cmd->add_flag("--synthetic", [](std::int64_t) {},
                        "use the built-in 640x480 fixture (default when no files given)");
    bench_cmd->add_option("--iters", bench_iters, "iterations")->check(CLI::Range(1, 1000000));
    add_pipeline_flags(bench_cmd, bench_cfg);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("fingercount");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(count_cmd)) return cmd_count(count_in, count_cfg, count_json, out);
        if (app.got_subcommand(annotate_cmd)) {
            return cmd_annotate(annotate_in, annotate_cfg, annotate_out);
        }
        if (app.got_subcommand(synth_cmd)) {
            return cmd_synth(synth_count, synth_orientation, synth_seed_opt->count() > 0,
                             synth_seed, synth_out);
        }
        if (app.got_subcommand(corpus_cmd)) {
            return cmd_corpus(corpus_params, corpus_out, corpus_manifest, out);
        }
        if (app.got_subcommand(eval_cmd)) {
            return cmd_eval(eval_manifest, eval_scan, eval_denoise, eval_csv, out);
        }
        if (app.got_subcommand(bench_cmd)) {
            return cmd_bench(bench_in, bench_cfg, bench_iters, out);
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const PnmParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fingercount
