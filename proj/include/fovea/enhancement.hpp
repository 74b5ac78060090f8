#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fovea/error.hpp"
#include "fovea/image.hpp"
#include "fovea/morphology.hpp"

namespace fovea {

struct Histogram
{
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

using LevelMap = std::array<std::uint8_t, 256>;

namespace detail {

inline Histogram histogram_of(const GrayImage& f, const FovMask* mask)
{
    if (mask && !mask->same_shape(f))
        throw std::invalid_argument("mask dimensions do not match image");
    Histogram h;
    auto px = f.pixels();
    if (mask) {
        auto m = mask->pixels();
        for (std::size_t i = 0; i < px.size(); ++i)
            if (m[i])
                ++h.counts[px[i]];
    } else {
        for (auto v : px)
            ++h.counts[v];
    }
    for (auto c : h.counts)
        h.total += c;
    if (h.total == 0)
        throw EmptyRegion();
    return h;
}

inline LevelMap identity_map()
{
    LevelMap m{};
    for (int v = 0; v < 256; ++v)
        m[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(v);
    return m;
}

inline int occupied_levels(const Histogram& h)
{
    int n = 0;
    for (auto c : h.counts)
        n += c != 0;
    return n;
}

inline GrayImage apply_map(const GrayImage& f, const LevelMap& map)
{
    GrayImage out(f.width(), f.height());
    auto src = f.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = map[src[i]];
    return out;
}

} // namespace detail

inline Histogram build_histogram(const GrayImage& f)
{
    return detail::histogram_of(f, nullptr);
}

/// Histogram of the pixels inside the mask only.
inline Histogram build_histogram(const GrayImage& f, const FovMask& mask)
{
    return detail::histogram_of(f, &mask);
}

/// m(v) = round(255 (cdf(v) - cdf_min) / (total - cdf_min)), round half up,
/// where cdf_min is the smallest nonzero cumulative count. Levels below the
/// first occupied one map to 0. A single-level histogram maps to identity.
inline LevelMap equalization_map(const Histogram& h)
{
    std::uint64_t cdf_min = 0;
    for (auto c : h.counts) {
        if (c) {
            cdf_min = c;
            break;
        }
    }
    if (h.total == 0 || h.total == cdf_min)
        return detail::identity_map();

    const std::uint64_t denom = h.total - cdf_min;
    LevelMap map{};
    std::uint64_t cdf = 0;
    for (std::size_t v = 0; v < 256; ++v) {
        cdf += h.counts[v];
        if (cdf < cdf_min) {
            map[v] = 0;
            continue;
        }
        const std::uint64_t num = 255 * (cdf - cdf_min);
        map[v] = static_cast<std::uint8_t>((2 * num + denom) / (2 * denom));
    }
    return map;
}

/// Global histogram equalization. The mapping is learned from the masked
/// pixels only but applied to the whole image.
inline GrayImage equalize_global(const GrayImage& f)
{
    return detail::apply_map(f, equalization_map(build_histogram(f)));
}

inline GrayImage equalize_global(const GrayImage& f, const FovMask& mask)
{
    return detail::apply_map(f, equalization_map(build_histogram(f, mask)));
}

/// Clips every bin at `limit` and spreads the excess evenly over all bins.
/// The remainder of the integer division goes to evenly strided bins.
inline Histogram clip_histogram(const Histogram& h, std::uint64_t limit)
{
    Histogram out = h;
    std::uint64_t excess = 0;
    for (auto& c : out.counts) {
        if (c > limit) {
            excess += c - limit;
            c = limit;
        }
    }
    if (excess == 0)
        return out;
    const std::uint64_t share = excess / 256;
    std::uint64_t rest = excess % 256;
    for (auto& c : out.counts)
        c += share;
    if (rest) {
        const std::size_t step = std::max<std::size_t>(1, 256 / rest);
        for (std::size_t v = 0; v < 256 && rest; v += step, --rest)
            ++out.counts[v];
    }
    return out;
}

/// Contrast-limited tiled equalization.
///
/// The image is cut into tiles x tiles cells. Each cell histogram is clipped
/// at clip * (cell pixels / 256), equalized with equalization_map, and the
/// per-cell mappings are blended bilinearly between cell centers. Cells with
/// a single occupied level keep the identity mapping. tiles = 1 with an
/// infinite clip reproduces equalize_global.
inline GrayImage equalize_adaptive(const GrayImage& f, int tiles, double clip)
{
    if (tiles < 1)
        throw std::invalid_argument("tile count must be at least 1");
    if (!(clip >= 1.0))
        throw std::invalid_argument("clip limit must be at least 1");

    const int width = f.width();
    const int height = f.height();
    std::vector<int> xs(static_cast<std::size_t>(tiles) + 1);
    std::vector<int> ys(static_cast<std::size_t>(tiles) + 1);
    for (int i = 0; i <= tiles; ++i) {
        xs[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long long>(i) * width / tiles);
        ys[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long long>(i) * height / tiles);
    }
    for (int i = 0; i < tiles; ++i)
        for (int j = 0; j < tiles; ++j) {
            const long long area = static_cast<long long>(xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            if (area < 2)
                throw TileTooSmall();
        }

    std::vector<LevelMap> maps(static_cast<std::size_t>(tiles) * tiles);
    for (int ty = 0; ty < tiles; ++ty) {
        for (int tx = 0; tx < tiles; ++tx) {
            Histogram h;
            for (int y = ys[ty]; y < ys[ty + 1]; ++y) {
                auto r = f.row(y);
                for (int x = xs[tx]; x < xs[tx + 1]; ++x)
                    ++h.counts[r[static_cast<std::size_t>(x)]];
            }
            h.total = static_cast<std::uint64_t>(xs[tx + 1] - xs[tx]) * (ys[ty + 1] - ys[ty]);

            LevelMap& map = maps[static_cast<std::size_t>(ty) * tiles + tx];
            if (detail::occupied_levels(h) <= 1) {
                map = detail::identity_map();
                continue;
            }
            if (std::isfinite(clip)) {
                const double raw = clip * static_cast<double>(h.total) / 256.0;
                const auto limit = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
                h = clip_histogram(h, limit);
            }
            map = equalization_map(h);
        }
    }

    // Per-axis neighbour cells and blend weight, clamped outside the
    // outermost cell centers.
    struct Blend
    {
        int lo;
        int hi;
        double t;
    };
    auto blends = [tiles](const std::vector<int>& edges, int extent) {
        std::vector<double> centers(static_cast<std::size_t>(tiles));
        for (int i = 0; i < tiles; ++i)
            centers[static_cast<std::size_t>(i)] = (edges[i] + edges[i + 1] - 1) / 2.0;
        std::vector<Blend> out(static_cast<std::size_t>(extent));
        int i = 0;
        for (int p = 0; p < extent; ++p) {
            if (p <= centers.front()) {
                out[static_cast<std::size_t>(p)] = {0, 0, 0.0};
            } else if (p >= centers.back()) {
                out[static_cast<std::size_t>(p)] = {tiles - 1, tiles - 1, 0.0};
            } else {
                while (centers[static_cast<std::size_t>(i + 1)] <= p)
                    ++i;
                const double c0 = centers[static_cast<std::size_t>(i)];
                const double c1 = centers[static_cast<std::size_t>(i + 1)];
                out[static_cast<std::size_t>(p)] = {i, i + 1, (p - c0) / (c1 - c0)};
            }
        }
        return out;
    };
    const auto bx = blends(xs, width);
    const auto by = blends(ys, height);

    GrayImage out(width, height);
    for (int y = 0; y < height; ++y) {
        const Blend& b = by[static_cast<std::size_t>(y)];
        const LevelMap* row0 = &maps[static_cast<std::size_t>(b.lo) * tiles];
        const LevelMap* row1 = &maps[static_cast<std::size_t>(b.hi) * tiles];
        auto src = f.row(y);
        auto dst = out.row(y);
        for (int x = 0; x < width; ++x) {
            const Blend& a = bx[static_cast<std::size_t>(x)];
            const auto v = src[static_cast<std::size_t>(x)];
            const double m00 = row0[a.lo][v];
            const double m01 = row0[a.hi][v];
            const double m10 = row1[a.lo][v];
            const double m11 = row1[a.hi][v];
            const double top = m00 + a.t * (m01 - m00);
            const double bottom = m10 + a.t * (m11 - m10);
            const double value = top + b.t * (bottom - top);
            dst[static_cast<std::size_t>(x)] = saturate_u8(static_cast<int>(std::floor(value + 0.5)));
        }
    }
    return out;
}

inline constexpr int kDefaultDenoiseRadius = 5;

/// Opening followed by closing with a disk: erode, dilate, dilate, erode.
inline GrayImage denoise(const GrayImage& f, int radius = kDefaultDenoiseRadius)
{
    const auto se = make_disk(radius);
    return closing(opening(f, se), se);
}

} // namespace fovea
