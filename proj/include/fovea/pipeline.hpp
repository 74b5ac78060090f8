#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fovea/blobs.hpp"
#include "fovea/color.hpp"
#include "fovea/enhancement.hpp"
#include "fovea/error.hpp"
#include "fovea/image.hpp"
#include "fovea/io.hpp"
#include "fovea/morphology.hpp"
#include "fovea/segmentation.hpp"

namespace fovea {

enum class Equalization
{
    global,
    tiled,
};

struct PipelineConfig
{
    int enhance_radius = 15;
    int denoise_radius = kDefaultDenoiseRadius;
    Equalization equalization = Equalization::tiled;
    int tiles = 8;
    double clip = 2.0;
    double otsu_offset = kDefaultOtsuOffset;
    long long area_min = kDefaultAreaMin;
    long long area_max = kDefaultAreaMax;
    double circ_min = kDefaultCircularityMin;
    int connectivity = kDefaultConnectivity;
    int fov_tol = kDefaultFovTolerance;
    bool repeat_enhance_after_eq = false;

    void validate() const
    {
        if (enhance_radius < 0)
            throw ConfigError("enhance_radius must be >= 0");
        if (denoise_radius < 0)
            throw ConfigError("denoise_radius must be >= 0");
        if (tiles < 1)
            throw ConfigError("tiles must be >= 1");
        if (!(clip >= 1.0))
            throw ConfigError("clip must be >= 1");
        if (!(otsu_offset >= 0.0 && otsu_offset <= 1.0))
            throw ConfigError("otsu_offset must lie in [0, 1]");
        if (area_min < 0 || area_min >= area_max)
            throw ConfigError("area window must satisfy 0 <= area_min < area_max");
        if (!(circ_min >= 0.0 && circ_min <= 1.0))
            throw ConfigError("circ_min must lie in [0, 1]");
        if (connectivity != 4 && connectivity != 8)
            throw ConfigError("connectivity must be 4 or 8");
        if (fov_tol < 0 || fov_tol > 255)
            throw ConfigError("fov_tol must lie in [0, 255]");
    }
};

struct CandidateStats
{
    long long area = 0;
    double circularity = 0.0;
    int otsu_level = 0;
    double effective_t = 0.0;
};

struct StageTiming
{
    std::string stage;
    double ms = 0.0;
};

struct DetectionResult
{
    std::string source;
    int width = 0;
    int height = 0;
    bool detected = false;
    std::optional<Point> fovea;
    std::optional<CandidateStats> candidate;
    /// Stages in execution order; doubles as the stage trace.
    std::vector<StageTiming> timings;
    double total_ms = 0.0;
    /// Set when the image could not be processed (batch mode only).
    std::optional<std::string> error;

    /// The stage-independent part of the result; what determinism checks compare.
    bool same_detection(const DetectionResult& o) const
    {
        auto same_candidate = [](const std::optional<CandidateStats>& a, const std::optional<CandidateStats>& b) {
            if (a.has_value() != b.has_value())
                return false;
            return !a
                   || (a->area == b->area && a->circularity == b->circularity && a->otsu_level == b->otsu_level
                       && a->effective_t == b->effective_t);
        };
        return source == o.source && width == o.width && height == o.height && detected == o.detected
               && fovea == o.fovea && same_candidate(candidate, o.candidate) && error == o.error;
    }
};

/// Intermediates kept for debug dumps.
struct StageImages
{
    GrayImage grayscale;
    GrayImage enhanced;
    GrayImage equalized;
    GrayImage denoised;
    BinaryImage binary;
    ComponentSet components;
};

namespace detail {

inline double round_tenth(double v)
{
    return std::round(v * 10.0) / 10.0;
}

class StageClock
{
public:
    using clock = std::chrono::steady_clock;

    explicit StageClock(std::vector<StageTiming>& out) : out_(out), start_(clock::now()), mark_(start_) {}

    void lap(const char* stage)
    {
        const auto now = clock::now();
        out_.push_back({stage, round_tenth(std::chrono::duration<double, std::milli>(now - mark_).count())});
        mark_ = now;
    }

    double total_ms() const
    {
        return round_tenth(std::chrono::duration<double, std::milli>(clock::now() - start_).count());
    }

private:
    std::vector<StageTiming>& out_;
    clock::time_point start_;
    clock::time_point mark_;
};

inline DetectionResult detect_impl(const RgbImage& img, const PipelineConfig& cfg, StageImages* keep)
{
    cfg.validate();
    DetectionResult result;
    result.width = img.width();
    result.height = img.height();
    StageClock clock(result.timings);

    GrayImage gray = to_grayscale(img);
    clock.lap("grayscale");

    const FovMask fov = estimate_fov_mask(gray, cfg.fov_tol);
    clock.lap("fov_mask");

    const auto enhance_se = make_disk(cfg.enhance_radius);
    GrayImage enhanced = enhance_contrast(gray, enhance_se);
    clock.lap("enhance_contrast");

    GrayImage equalized = cfg.equalization == Equalization::global ? equalize_global(enhanced, fov)
                                                                   : equalize_adaptive(enhanced, cfg.tiles, cfg.clip);
    clock.lap("equalize");

    GrayImage denoised = denoise(equalized, cfg.denoise_radius);
    clock.lap("denoise");

    if (cfg.repeat_enhance_after_eq) {
        denoised = enhance_contrast(denoised, enhance_se);
        clock.lap("enhance_repeat");
    }

    const Histogram hist = build_histogram(denoised, fov);
    clock.lap("histogram");

    const ThresholdReport report = otsu(hist);
    clock.lap("otsu");

    BinaryImage binary = binarize_dark(denoised, report, cfg.otsu_offset, fov);
    clock.lap("binarize");

    ComponentSet components = label_components(binary, cfg.connectivity);
    clock.lap("label_components");

    const auto candidate = select_macula(components, cfg.area_min, cfg.area_max, cfg.circ_min);
    clock.lap("select_macula");

    if (candidate) {
        result.detected = true;
        result.fovea = candidate->fovea;
        result.candidate = CandidateStats{candidate->component.area, candidate->component.circularity,
                                          report.otsu_level,
                                          effective_threshold(report.normalized_t, cfg.otsu_offset)};
    }
    result.total_ms = clock.total_ms();

    if (keep) {
        keep->grayscale = std::move(gray);
        keep->enhanced = std::move(enhanced);
        keep->equalized = std::move(equalized);
        keep->denoised = std::move(denoised);
        keep->binary = std::move(binary);
        keep->components = std::move(components);
    }
    return result;
}

} // namespace detail

/// Runs the full detection chain:
/// grayscale, field-of-view mask, contrast enhancement, equalization,
/// denoising, masked histogram, Otsu, dark binarization, labeling, selection.
inline DetectionResult detect(const RgbImage& img, const PipelineConfig& cfg = {})
{
    return detail::detect_impl(img, cfg, nullptr);
}

inline DetectionResult detect(const RgbImage& img, const PipelineConfig& cfg, StageImages& keep)
{
    return detail::detect_impl(img, cfg, &keep);
}

inline std::string source_id(const std::string& path)
{
    return std::filesystem::path(path).filename().string();
}

/// Loads and detects every path. Results keep input order; a file that
/// fails to load or process yields a result with `error` set.
inline std::vector<DetectionResult> detect_batch(const std::vector<std::string>& paths, const PipelineConfig& cfg,
                                                 int parallelism = 1)
{
    if (parallelism < 1)
        throw std::invalid_argument("parallelism must be at least 1");
    cfg.validate();
    std::vector<DetectionResult> results(paths.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) {
            DetectionResult r;
            try {
                r = detect(load_image(paths[i]), cfg);
            } catch (const Error& e) {
                r = DetectionResult{};
                r.error = e.what();
            }
            r.source = source_id(paths[i]);
            results[i] = std::move(r);
        }
    };

    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(parallelism),
                                                                        std::max<std::size_t>(paths.size(), 1)));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    return results;
}

} // namespace fovea
