#pragma once

#include <algorithm>
#include <cstdint>

#include "fovea/error.hpp"
#include "fovea/image.hpp"
#include "fovea/morphology.hpp"

namespace fovea {

/// Luma with weights 0.299 / 0.587 / 0.114, rounded half up.
inline std::uint8_t luma(Rgb p) noexcept
{
    // Weights scaled by 1000 keep the rounding exact.
    const unsigned sum = 299u * p.r + 587u * p.g + 114u * p.b;
    return static_cast<std::uint8_t>((sum + 500u) / 1000u);
}

inline GrayImage to_grayscale(const RgbImage& img)
{
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = luma(src[i]);
    return out;
}

inline constexpr int kDefaultFovTolerance = 10;
inline constexpr int kFovClosingRadius = 5;

/// Pixels brighter than tol, closed with a radius-5 disk to fill dark
/// pinholes (vessels) near the rim of the field of view.
inline FovMask estimate_fov_mask(const GrayImage& img, int tol = kDefaultFovTolerance)
{
    if (tol < 0 || tol > 255)
        throw std::invalid_argument("fov tolerance must lie in [0, 255]");
    GrayImage bright(img.width(), img.height());
    auto src = img.pixels();
    auto dst = bright.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] > tol ? 255 : 0;

    const GrayImage closed = closing(bright, make_disk(kFovClosingRadius));
    FovMask mask(img.width(), img.height());
    auto c = closed.pixels();
    auto m = mask.pixels();
    bool any = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        m[i] = c[i] != 0;
        any = any || m[i];
    }
    if (!any)
        throw DegenerateMask();
    return mask;
}

} // namespace fovea
