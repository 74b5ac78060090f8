#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

/// Flat rasterized disk {(dx, dy) : dx^2 + dy^2 <= r^2}.
///
/// Besides the offset list the element keeps, for every row dy in [-r, r],
/// the half-width of its horizontal run. The fast kernels below only use the
/// run table; the offsets are the definitional form.
class StructuringElement
{
public:
    StructuringElement() : StructuringElement(0) {}

    explicit StructuringElement(int radius) : radius_(radius)
    {
        if (radius < 0)
            throw std::invalid_argument("disk radius must be nonnegative");
        const long long r2 = static_cast<long long>(radius) * radius;
        half_widths_.resize(2 * static_cast<std::size_t>(radius) + 1);
        for (int dy = -radius; dy <= radius; ++dy) {
            int w = 0;
            while (static_cast<long long>(w + 1) * (w + 1) + static_cast<long long>(dy) * dy <= r2)
                ++w;
            half_widths_[static_cast<std::size_t>(dy + radius)] = w;
            for (int dx = -w; dx <= w; ++dx)
                offsets_.push_back({dx, dy});
        }
    }

    int radius() const noexcept { return radius_; }
    const std::vector<Point>& offsets() const noexcept { return offsets_; }
    std::size_t size() const noexcept { return offsets_.size(); }

    /// Half-width of the run on row dy, |dy| <= radius.
    int half_width(int dy) const { return half_widths_.at(static_cast<std::size_t>(dy + radius_)); }

private:
    int radius_;
    std::vector<Point> offsets_;
    std::vector<int> half_widths_;
};

inline StructuringElement make_disk(int radius)
{
    return StructuringElement(radius);
}

namespace detail {

struct MaxOp
{
    static std::uint8_t apply(std::uint8_t a, std::uint8_t b) noexcept { return a > b ? a : b; }
};

struct MinOp
{
    static std::uint8_t apply(std::uint8_t a, std::uint8_t b) noexcept { return a < b ? a : b; }
};

/// Windowed extreme over a flat disk, window clipped to the image.
///
/// run[w] holds, per pixel, the extreme over the clipped horizontal segment
/// [x - w, x + w]; run[w] = op(run[w-1] shifted left, itself, shifted right).
/// The output then folds the run of the matching half-width from each row
/// of the disk. Both passes are plain byte loops the compiler vectorizes.
template <typename Op>
GrayImage windowed_extreme(const GrayImage& f, const StructuringElement& se)
{
    const int width = f.width();
    const int height = f.height();
    const int radius = se.radius();
    if (radius == 0)
        return f;

    const std::size_t n = f.size();
    std::vector<char> needed(static_cast<std::size_t>(radius) + 1, 0);
    for (int dy = -radius; dy <= radius; ++dy)
        needed[static_cast<std::size_t>(se.half_width(dy))] = 1;

    std::vector<std::vector<std::uint8_t>> runs(static_cast<std::size_t>(radius) + 1);
    runs[0].assign(f.pixels().begin(), f.pixels().end());
    std::vector<std::uint8_t> prev = runs[0];
    std::vector<std::uint8_t> cur(n);
    for (int w = 1; w <= radius; ++w) {
        for (int y = 0; y < height; ++y) {
            const std::uint8_t* p = prev.data() + static_cast<std::size_t>(y) * width;
            std::uint8_t* c = cur.data() + static_cast<std::size_t>(y) * width;
            if (width == 1) {
                c[0] = p[0];
                continue;
            }
            c[0] = Op::apply(p[0], p[1]);
            for (int x = 1; x < width - 1; ++x)
                c[x] = Op::apply(Op::apply(p[x - 1], p[x]), p[x + 1]);
            c[width - 1] = Op::apply(p[width - 2], p[width - 1]);
        }
        if (needed[static_cast<std::size_t>(w)])
            runs[static_cast<std::size_t>(w)] = cur;
        std::swap(prev, cur);
    }

    GrayImage out(width, height);
    for (int y = 0; y < height; ++y) {
        std::uint8_t* o = out.row(y).data();
        bool first = true;
        for (int dy = -radius; dy <= radius; ++dy) {
            const int sy = y + dy;
            if (sy < 0 || sy >= height)
                continue;
            const std::uint8_t* src = runs[static_cast<std::size_t>(se.half_width(dy))].data()
                                      + static_cast<std::size_t>(sy) * width;
            if (first) {
                std::copy(src, src + width, o);
                first = false;
            } else {
                for (int x = 0; x < width; ++x)
                    o[x] = Op::apply(o[x], src[x]);
            }
        }
    }
    return out;
}

} // namespace detail

/// Flat grayscale dilation: windowed maximum over the in-bounds part of the disk.
inline GrayImage dilate(const GrayImage& f, const StructuringElement& se)
{
    return detail::windowed_extreme<detail::MaxOp>(f, se);
}

/// Flat grayscale erosion: windowed minimum over the in-bounds part of the disk.
inline GrayImage erode(const GrayImage& f, const StructuringElement& se)
{
    return detail::windowed_extreme<detail::MinOp>(f, se);
}

inline GrayImage opening(const GrayImage& f, const StructuringElement& se)
{
    return dilate(erode(f, se), se);
}

inline GrayImage closing(const GrayImage& f, const StructuringElement& se)
{
    return erode(dilate(f, se), se);
}

namespace detail {

inline SignedImage difference(const GrayImage& a, const GrayImage& b)
{
    SignedImage out(a.width(), a.height());
    auto pa = a.pixels();
    auto pb = b.pixels();
    auto po = out.pixels();
    for (std::size_t i = 0; i < po.size(); ++i)
        po[i] = static_cast<std::int16_t>(static_cast<int>(pa[i]) - static_cast<int>(pb[i]));
    return out;
}

} // namespace detail

/// f - opening(f). Nonnegative, but kept signed for the composite below.
inline SignedImage top_hat(const GrayImage& f, const StructuringElement& se)
{
    return detail::difference(f, opening(f, se));
}

/// closing(f) - f.
inline SignedImage bottom_hat(const GrayImage& f, const StructuringElement& se)
{
    return detail::difference(closing(f, se), f);
}

/// f + top_hat(f) - bottom_hat(f), evaluated in int and saturated to [0, 255].
inline GrayImage enhance_contrast(const GrayImage& f, const StructuringElement& se)
{
    const SignedImage top = top_hat(f, se);
    const SignedImage bottom = bottom_hat(f, se);
    GrayImage out(f.width(), f.height());
    auto src = f.pixels();
    auto t = top.pixels();
    auto b = bottom.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = saturate_u8(static_cast<int>(src[i]) + t[i] - b[i]);
    return out;
}

} // namespace fovea
