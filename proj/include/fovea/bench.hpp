#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fovea/evaluation.hpp"
#include "fovea/phantom.hpp"
#include "fovea/pipeline.hpp"

namespace fovea {

struct BenchOptions
{
    int phantoms = 100;
    std::uint64_t seed = 7;
    PhantomSpec spec{};
    PipelineConfig config{};
};

struct BenchCase
{
    std::uint64_t seed = 0;
    PointF truth;
    DetectionResult result;
    /// Distance from the detected fovea to the true macula center, if detected.
    std::optional<double> error;
};

struct BenchReport
{
    std::vector<BenchCase> cases;
    long long detected = 0;
    Summary centroid_error;
    Summary total_ms;
    /// Median milliseconds per stage, in pipeline order.
    std::vector<StageTiming> stage_median_ms;

    double detection_rate() const
    {
        return cases.empty() ? 0.0 : static_cast<double>(detected) / static_cast<double>(cases.size());
    }
};

/// Per-phantom seeds are drawn from one generator seeded with `seed`, so
/// different bench seeds give unrelated phantom sets.
inline std::vector<std::uint64_t> bench_seeds(std::uint64_t seed, int count)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(std::max(count, 0)));
    for (auto& s : out)
        s = rng();
    return out;
}

/// Generates and detects phantoms one at a time on the calling thread.
inline BenchReport run_bench(const BenchOptions& opt)
{
    if (opt.phantoms < 1)
        throw std::invalid_argument("phantom count must be at least 1");
    opt.config.validate();
    BenchReport report;
    std::vector<double> errors;
    std::vector<double> totals;
    std::map<std::string, std::vector<double>> per_stage;
    std::vector<std::string> order;

    for (std::uint64_t s : bench_seeds(opt.seed, opt.phantoms)) {
        const Phantom ph = make_phantom(opt.spec, s);
        BenchCase c;
        c.seed = s;
        c.truth = ph.macula;
        c.result = detect(ph.image, opt.config);
        c.result.source = "phantom-" + std::to_string(s);
        if (c.result.detected) {
            ++report.detected;
            c.error = std::hypot(c.result.fovea->x - ph.macula.x, c.result.fovea->y - ph.macula.y);
            errors.push_back(*c.error);
        }
        totals.push_back(c.result.total_ms);
        for (const auto& t : c.result.timings) {
            auto& v = per_stage[t.stage];
            if (v.empty())
                order.push_back(t.stage);
            v.push_back(t.ms);
        }
        report.cases.push_back(std::move(c));
    }
    report.centroid_error = summarize(std::move(errors));
    report.total_ms = summarize(std::move(totals));
    for (const auto& stage : order)
        report.stage_median_ms.push_back({stage, summarize(per_stage[stage]).median});
    return report;
}

/// Lines that depend only on the seed and configuration.
inline std::string format_bench_detection(const BenchReport& r)
{
    char buf[256];
    std::ostringstream out;
    std::snprintf(buf, sizeof(buf), "phantoms %zu detected %lld detection_rate %.3f\n", r.cases.size(), r.detected,
                  r.detection_rate());
    out << buf;
    const Summary& e = r.centroid_error;
    std::snprintf(buf, sizeof(buf), "centroid_error_px n=%zu mean=%.3f median=%.3f p95=%.3f max=%.3f\n", e.count,
                  e.mean, e.median, e.p95, e.max);
    out << buf;
    return out.str();
}

/// Wall-clock lines; these vary from run to run.
inline std::string format_bench_timing(const BenchReport& r)
{
    char buf[256];
    std::ostringstream out;
    const Summary& t = r.total_ms;
    std::snprintf(buf, sizeof(buf), "total_ms mean=%.1f median=%.1f p95=%.1f max=%.1f\n", t.mean, t.median, t.p95,
                  t.max);
    out << buf;
    for (const auto& s : r.stage_median_ms) {
        std::snprintf(buf, sizeof(buf), "  stage %-16s median_ms=%.1f\n", s.stage.c_str(), s.ms);
        out << buf;
    }
    return out.str();
}

} // namespace fovea
