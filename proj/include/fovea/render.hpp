#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "fovea/blobs.hpp"
#include "fovea/error.hpp"
#include "fovea/image.hpp"
#include "fovea/io.hpp"
#include "fovea/pipeline.hpp"

namespace fovea {

inline constexpr int kMarkerRadius = 20;
inline constexpr int kCrosshairArm = 10;
inline constexpr Rgb kMarkerColor{0, 255, 0};

/// Pixels covered by the detection marker: a 1 px ring of radius 20 around
/// the center plus a crosshair with 10 px arms.
inline BinaryImage marker_stencil(int width, int height, Point center)
{
    BinaryImage stencil(width, height, 0);
    const int reach = kMarkerRadius + 1;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            const int x = center.x + dx;
            const int y = center.y + dy;
            if (!stencil.contains(x, y))
                continue;
            const double d = std::hypot(dx, dy);
            const bool ring = std::abs(d - kMarkerRadius) < 0.5;
            const bool cross = (dx == 0 && std::abs(dy) <= kCrosshairArm) || (dy == 0 && std::abs(dx) <= kCrosshairArm);
            if (ring || cross)
                stencil(x, y) = 1;
        }
    }
    return stencil;
}

inline RgbImage annotate(const RgbImage& img, const DetectionResult& result)
{
    RgbImage out = img;
    if (!result.detected || !result.fovea)
        return out;
    const BinaryImage stencil = marker_stencil(img.width(), img.height(), *result.fovea);
    auto s = stencil.pixels();
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        if (s[i])
            px[i] = kMarkerColor;
    return out;
}

/// Writes `img` as PNG, marked at the fovea when one was detected.
inline void render_annotation(const RgbImage& img, const DetectionResult& result, const std::string& out)
{
    if (result.width != img.width() || result.height != img.height())
        throw std::invalid_argument("detection result does not match image dimensions");
    save_png(annotate(img, result), out);
}

inline GrayImage binary_to_gray(const BinaryImage& bin)
{
    GrayImage out(bin.width(), bin.height());
    auto src = bin.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] ? 255 : 0;
    return out;
}

/// Background black, each label a stable pseudo-random color.
inline RgbImage label_colormap(const ComponentSet& set)
{
    const auto& labels = set.labels;
    RgbImage out(labels.width(), labels.height());
    auto src = labels.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!src[i])
            continue;
        std::uint32_t h = static_cast<std::uint32_t>(src[i]) * 2654435761u;
        dst[i] = Rgb{static_cast<std::uint8_t>(64 + (h >> 8) % 192), static_cast<std::uint8_t>(64 + (h >> 16) % 192),
                     static_cast<std::uint8_t>(64 + (h >> 24) % 192)};
    }
    return out;
}

} // namespace fovea
