#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fovea {

struct Rgb
{
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Point
{
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF
{
    double x = 0.0;
    double y = 0.0;
};

namespace tag {
struct Plain;
struct Fov;
struct Binary;
} // namespace tag

/// Row-major raster with a top-left origin. x grows rightward, y downward.
///
/// The tag parameter keeps pixel-identical storage types (masks, binary
/// segmentations, gray levels) from being mixed up at call sites.
template <typename T, typename Tag = tag::Plain>
class Raster
{
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width < 1 || height < 1)
            throw std::invalid_argument("raster dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data))
    {
        if (width < 1 || height < 1)
            throw std::invalid_argument("raster dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw std::invalid_argument("raster data length does not match dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    std::span<T> row(int y) noexcept
    {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const T> row(int y) const noexcept
    {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    template <typename U, typename OtherTag>
    bool same_shape(const Raster<U, OtherTag>& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RgbImage = Raster<Rgb>;
using GrayImage = Raster<std::uint8_t>;
/// Intermediate for arithmetic that leaves [0, 255], e.g. hat transforms.
using SignedImage = Raster<std::int16_t>;
/// 1 = inside the camera field of view.
using FovMask = Raster<std::uint8_t, tag::Fov>;
/// 1 = foreground.
using BinaryImage = Raster<std::uint8_t, tag::Binary>;

inline std::uint8_t saturate_u8(int v) noexcept
{
    return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

inline GrayImage invert(const GrayImage& f)
{
    GrayImage out(f.width(), f.height());
    auto src = f.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<std::uint8_t>(255 - src[i]);
    return out;
}

} // namespace fovea
