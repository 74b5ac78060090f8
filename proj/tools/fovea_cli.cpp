// fovea: command-line front end for detection, batch runs, scoring and the
// phantom benchmark.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fovea/fovea.hpp"

namespace fs = std::filesystem;
using namespace fovea;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ConfigOptions
{
    std::string file;
    std::vector<std::string> overrides;

    PipelineConfig resolve() const
    {
        PipelineConfig cfg = file.empty() ? PipelineConfig{} : load_config(file);
        for (const auto& o : overrides)
            apply_override(cfg, o);
        cfg.validate();
        return cfg;
    }
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts)
{
    cmd->add_option("--config", opts.file, "JSON file with pipeline settings");
    cmd->add_option("--set", opts.overrides, "Override one setting, key=value (repeatable)");
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_image_file(const fs::path& p)
{
    const std::string ext = lower(p.extension().string());
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

int default_threads()
{
    if (const char* env = std::getenv("FOVEA_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 1024)
            throw UsageError(std::string("FOVEA_THREADS must be a positive integer, got \"") + env + "\"");
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string summary_line(const DetectionResult& r)
{
    char buf[256];
    if (r.error)
        return r.source + ": error: " + *r.error;
    if (!r.detected) {
        std::snprintf(buf, sizeof(buf), "%s: no macula detected (%.1f ms)", r.source.c_str(), r.total_ms);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%s: fovea (%d, %d) area %lld circularity %.3f otsu %d (%.1f ms)",
                  r.source.c_str(), r.fovea->x, r.fovea->y, r.candidate->area, r.candidate->circularity,
                  r.candidate->otsu_level, r.total_ms);
    return buf;
}

fs::path annotation_path(const fs::path& out, const std::string& source)
{
    return out / (source + ".annotated.png");
}

/// The six stage dumps go to <out>/<source>.stages/.
void write_stages(const fs::path& out, const std::string& source, const StageImages& s)
{
    const fs::path dir = out / (source + ".stages");
    fs::create_directories(dir);
    save_png(s.grayscale, (dir / "1_grayscale.png").string());
    save_png(s.enhanced, (dir / "2_enhanced.png").string());
    save_png(s.equalized, (dir / "3_equalized.png").string());
    save_png(s.denoised, (dir / "4_denoised.png").string());
    save_png(binary_to_gray(s.binary), (dir / "5_binary.png").string());
    save_png(label_colormap(s.components), (dir / "6_components.png").string());
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw WriteError(dir.string(), "cannot create output directory");
}

int run_detect(const std::string& image, const fs::path& out, bool as_json, bool debug, const ConfigOptions& co)
{
    const PipelineConfig cfg = co.resolve();
    ensure_dir(out);
    const RgbImage img = load_image(image);
    StageImages stages;
    DetectionResult r = debug ? detect(img, cfg, stages) : detect(img, cfg);
    r.source = source_id(image);
    render_annotation(img, r, annotation_path(out, r.source).string());
    if (debug)
        write_stages(out, r.source, stages);
    std::cout << (as_json ? canonical_dump(to_json(r)) : summary_line(r)) << '\n';
    return kExitOk;
}

int run_batch(const fs::path& dir, const fs::path& out, int threads, bool debug, const ConfigOptions& co)
{
    const PipelineConfig cfg = co.resolve();
    if (!fs::is_directory(dir))
        throw UsageError("not a directory: " + dir.string());
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    ensure_dir(out);

    const auto results = detect_batch(paths, cfg, threads);
    bool failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        DetectionResult r = results[i];
        if (!r.error) {
            // Second pass for outputs that need the pixels; detection is
            // deterministic, so the result is unchanged.
            try {
                const RgbImage img = load_image(paths[i]);
                if (debug) {
                    StageImages stages;
                    detect(img, cfg, stages);
                    write_stages(out, r.source, stages);
                }
                render_annotation(img, r, annotation_path(out, r.source).string());
            } catch (const Error& e) {
                r.error = e.what();
            }
        }
        failed = failed || r.error.has_value();
        std::cerr << "[" << i + 1 << "/" << results.size() << "] " << summary_line(r) << '\n';
    }
    save_results(results, (out / "results.json").string());
    std::cout << results.size() << " images, "
              << std::count_if(results.begin(), results.end(), [](const auto& r) { return r.detected; })
              << " detected, results in " << (out / "results.json").string() << '\n';
    return failed ? kExitFailure : kExitOk;
}

int run_eval(const std::string& results_path, const std::string& truth_path)
{
    const auto results = load_results(results_path);
    const auto truth = load_truth(truth_path);
    std::cout << format_report(score(results, truth));
    return kExitOk;
}

PhantomSpec parse_size(const std::string& size)
{
    PhantomSpec spec;
    if (size.empty())
        return spec;
    const auto x = size.find('x');
    try {
        std::size_t used = 0;
        if (x == std::string::npos)
            throw std::invalid_argument(size);
        spec.width = std::stoi(size.substr(0, x), &used);
        if (used != x)
            throw std::invalid_argument(size);
        spec.height = std::stoi(size.substr(x + 1), &used);
        if (used != size.size() - x - 1)
            throw std::invalid_argument(size);
    } catch (const std::exception&) {
        throw UsageError("--size must look like WIDTHxHEIGHT, got \"" + size + "\"");
    }
    if (spec.width < 64 || spec.height < 64)
        throw UsageError("--size must be at least 64x64");
    return spec;
}

int run_bench(int phantoms, std::uint64_t seed, const std::string& size, double max_median_ms,
              const ConfigOptions& co)
{
    BenchOptions opt;
    opt.phantoms = phantoms;
    opt.seed = seed;
    opt.spec = parse_size(size);
    opt.config = co.resolve();
    const BenchReport r = fovea::run_bench(opt);
    std::cout << format_bench_detection(r) << format_bench_timing(r);
    if (max_median_ms > 0.0 && r.total_ms.median > max_median_ms) {
        std::fprintf(stderr, "median %.1f ms exceeds limit %.1f ms\n", r.total_ms.median, max_median_ms);
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Locate the fovea in color fundus images."};
    app.require_subcommand(1);

    std::string image;
    std::string out = "fovea_out";
    bool as_json = false;
    bool debug = false;
    ConfigOptions detect_cfg;
    auto* detect_cmd = app.add_subcommand("detect", "Detect the fovea in one image");
    detect_cmd->add_option("image", image, "PNG or JPEG image")->required();
    detect_cmd->add_option("--out", out, "Directory for the annotated image");
    detect_cmd->add_flag("--json", as_json, "Print the result as one JSON line");
    detect_cmd->add_flag("--debug-stages", debug, "Also write the six intermediate stage images");
    add_config_options(detect_cmd, detect_cfg);

    std::string dir;
    std::string batch_out;
    int threads = 0;
    bool batch_debug = false;
    ConfigOptions batch_cfg;
    auto* batch_cmd = app.add_subcommand("batch", "Detect every PNG/JPEG file in a directory");
    batch_cmd->add_option("dir", dir, "Input directory")->required();
    batch_cmd->add_option("--out", batch_out, "Output directory (default <dir>/fovea_out)");
    batch_cmd->add_option("--threads", threads, "Worker threads (default $FOVEA_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    batch_cmd->add_flag("--debug-stages", batch_debug, "Also write the six intermediate stage images per file");
    add_config_options(batch_cmd, batch_cfg);

    std::string results_path;
    std::string truth_path;
    auto* eval_cmd = app.add_subcommand("eval", "Score results against ground truth");
    eval_cmd->add_option("--results", results_path, "results.json from a batch run")->required();
    eval_cmd->add_option("--truth", truth_path, "CSV: source,has_macula,fovea_x,fovea_y")->required();

    int phantoms = 100;
    std::uint64_t seed = 7;
    std::string size;
    double max_median_ms = 0.0;
    ConfigOptions bench_cfg;
    auto* bench_cmd = app.add_subcommand("bench", "Detect synthetic phantoms and report accuracy and timing");
    bench_cmd->add_option("--phantoms", phantoms, "Number of phantoms")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", seed, "Phantom seed");
    bench_cmd->add_option("--size", size, "Phantom size WIDTHxHEIGHT (default 700x1050)");
    bench_cmd->add_option("--max-median-ms", max_median_ms, "Exit 1 when the median detect time exceeds this");
    add_config_options(bench_cmd, bench_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*detect_cmd)
            return run_detect(image, out, as_json, debug, detect_cfg);
        if (*batch_cmd) {
            if (threads == 0)
                threads = default_threads();
            const fs::path target = batch_out.empty() ? fs::path(dir) / "fovea_out" : fs::path(batch_out);
            return run_batch(dir, target, threads, batch_debug, batch_cfg);
        }
        if (*eval_cmd)
            return run_eval(results_path, truth_path);
        if (*bench_cmd)
            return run_bench(phantoms, seed, size, max_median_ms, bench_cfg);
    } catch (const UsageError& e) {
        std::cerr << "fovea: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "fovea: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fovea: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
