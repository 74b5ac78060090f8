#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>

#include "fovea/enhancement.hpp"
#include "fovea/image.hpp"

namespace fovea {

struct ThresholdReport
{
    int otsu_level = 1;
    double normalized_t = 1.0 / 255.0;
    /// normalized_t - offset, clamped to [0, 1].
    double effective_t = 1.0 / 255.0;
    /// Between-class variance for every split t; entry 0 is unused and 0.
    std::array<double, 256> sigma2_curve{};
};

/// Class statistics at split t: class 0 holds levels < t, class 1 levels >= t.
struct OtsuTerms
{
    double omega0 = 0.0;
    double omega1 = 0.0;
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu = 0.0;
    /// omega0 (mu0 - mu)^2 + omega1 (mu1 - mu)^2
    double weighted_form = 0.0;
    /// omega0 omega1 (mu0 - mu1)^2
    double product_form = 0.0;
};

/// Evaluates both forms of the between-class variance at one split.
/// Either class being empty gives zero variance.
inline OtsuTerms otsu_terms(const Histogram& h, int t)
{
    if (t < 1 || t > 255)
        throw std::out_of_range("otsu split must lie in [1, 255]");
    if (h.total == 0)
        throw EmptyRegion();
    const double n = static_cast<double>(h.total);
    std::uint64_t c0 = 0;
    std::uint64_t s0 = 0;
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < 256; ++i) {
        s += i * h.counts[i];
        if (i < static_cast<std::size_t>(t)) {
            c0 += h.counts[i];
            s0 += i * h.counts[i];
        }
    }
    const std::uint64_t c1 = h.total - c0;
    OtsuTerms terms;
    terms.omega0 = static_cast<double>(c0) / n;
    terms.omega1 = static_cast<double>(c1) / n;
    terms.mu = static_cast<double>(s) / n;
    if (c0 == 0 || c1 == 0)
        return terms;
    terms.mu0 = static_cast<double>(s0) / static_cast<double>(c0);
    terms.mu1 = static_cast<double>(s - s0) / static_cast<double>(c1);
    const double d0 = terms.mu0 - terms.mu;
    const double d1 = terms.mu1 - terms.mu;
    const double d = terms.mu0 - terms.mu1;
    terms.weighted_form = terms.omega0 * d0 * d0 + terms.omega1 * d1 * d1;
    terms.product_form = terms.omega0 * terms.omega1 * d * d;
    return terms;
}

inline double effective_threshold(double normalized_t, double offset) noexcept
{
    return std::clamp(normalized_t - offset, 0.0, 1.0);
}

/// Exhaustive Otsu sweep over t = 1..255 maximizing
/// sigma^2(t) = omega0 omega1 (mu0 - mu1)^2. Ties go to the smallest t, so a
/// single-level histogram yields t = 1. effective_t is left at offset 0.
inline ThresholdReport otsu(const Histogram& h)
{
    if (h.total == 0)
        throw EmptyRegion();
    ThresholdReport report;
    const double n = static_cast<double>(h.total);
    std::uint64_t sum_all = 0;
    for (std::size_t i = 0; i < 256; ++i)
        sum_all += i * h.counts[i];

    std::uint64_t c0 = 0;
    std::uint64_t s0 = 0;
    double best = -1.0;
    for (int t = 1; t < 256; ++t) {
        c0 += h.counts[static_cast<std::size_t>(t - 1)];
        s0 += static_cast<std::uint64_t>(t - 1) * h.counts[static_cast<std::size_t>(t - 1)];
        const std::uint64_t c1 = h.total - c0;
        double sigma2 = 0.0;
        if (c0 != 0 && c1 != 0) {
            const double mu0 = static_cast<double>(s0) / static_cast<double>(c0);
            const double mu1 = static_cast<double>(sum_all - s0) / static_cast<double>(c1);
            const double d = mu0 - mu1;
            sigma2 = (static_cast<double>(c0) / n) * (static_cast<double>(c1) / n) * d * d;
        }
        report.sigma2_curve[static_cast<std::size_t>(t)] = sigma2;
        if (sigma2 > best) {
            best = sigma2;
            report.otsu_level = t;
        }
    }
    report.normalized_t = report.otsu_level / 255.0;
    report.effective_t = effective_threshold(report.normalized_t, 0.0);
    return report;
}

inline constexpr double kDefaultOtsuOffset = 0.2;

namespace detail {

inline BinaryImage binarize_dark_impl(const GrayImage& f, double effective_t, const FovMask* mask)
{
    if (mask && !mask->same_shape(f))
        throw std::invalid_argument("mask dimensions do not match image");
    BinaryImage out(f.width(), f.height());
    auto src = f.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const bool inside = !mask || mask->pixels()[i];
        dst[i] = inside && static_cast<double>(src[i]) / 255.0 < effective_t;
    }
    return out;
}

} // namespace detail

/// Dark regions are foreground: level / 255 < clamp(normalized_t - offset, 0, 1).
inline BinaryImage binarize_dark(const GrayImage& f, const ThresholdReport& report, double offset)
{
    if (offset < 0.0 || offset > 1.0)
        throw std::invalid_argument("offset must lie in [0, 1]");
    return detail::binarize_dark_impl(f, effective_threshold(report.normalized_t, offset), nullptr);
}

/// As above, restricted to pixels inside the mask.
inline BinaryImage binarize_dark(const GrayImage& f, const ThresholdReport& report, double offset,
                                 const FovMask& mask)
{
    if (offset < 0.0 || offset > 1.0)
        throw std::invalid_argument("offset must lie in [0, 1]");
    return detail::binarize_dark_impl(f, effective_threshold(report.normalized_t, offset), &mask);
}

} // namespace fovea
