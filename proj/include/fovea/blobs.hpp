#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

struct Component
{
    int label = 0;
    long long area = 0;
    std::vector<Point> pixels;
    PointF centroid;
    /// Largest distance between two pixel centers.
    double feret = 0.0;
    double circularity = 0.0;
};

struct ComponentSet
{
    std::vector<Component> components;
    int connectivity = 8;
    /// 0 for background, otherwise the component label.
    Raster<std::int32_t> labels;
};

struct MaculaCandidate
{
    Component component;
    Point fovea;
};

inline constexpr int kDefaultConnectivity = 8;
inline constexpr long long kDefaultAreaMin = 400;
inline constexpr long long kDefaultAreaMax = 5000;
inline constexpr double kDefaultCircularityMin = 0.6;

namespace detail {

inline long long cross(const Point& o, const Point& a, const Point& b) noexcept
{
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

inline long long squared_distance(const Point& a, const Point& b) noexcept
{
    const long long dx = a.x - b.x;
    const long long dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace detail

/// Andrew's monotone chain. Returns the strictly convex hull in
/// counter-clockwise order (collinear points dropped).
inline std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;

    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0)
            --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], *it) <= 0)
            --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

/// Squared Feret diameter of a convex polygon by rotating calipers.
inline long long hull_diameter_squared(const std::vector<Point>& hull)
{
    const std::size_t n = hull.size();
    if (n < 2)
        return 0;
    if (n == 2)
        return detail::squared_distance(hull[0], hull[1]);

    long long best = 0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ni = (i + 1) % n;
        while (detail::cross(hull[i], hull[ni], hull[(j + 1) % n]) > detail::cross(hull[i], hull[ni], hull[j]))
            j = (j + 1) % n;
        best = std::max({best, detail::squared_distance(hull[i], hull[j]),
                         detail::squared_distance(hull[ni], hull[j])});
    }
    return best;
}

/// Only the leftmost and rightmost pixel of every row can sit on the hull.
inline long long feret_squared(const std::vector<Point>& pixels)
{
    if (pixels.empty())
        return 0;
    int y0 = pixels.front().y;
    int y1 = y0;
    for (const auto& p : pixels) {
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const std::size_t rows = static_cast<std::size_t>(y1 - y0) + 1;
    std::vector<int> lo(rows, INT32_MAX);
    std::vector<int> hi(rows, INT32_MIN);
    for (const auto& p : pixels) {
        const auto r = static_cast<std::size_t>(p.y - y0);
        lo[r] = std::min(lo[r], p.x);
        hi[r] = std::max(hi[r], p.x);
    }
    std::vector<Point> extremes;
    extremes.reserve(2 * rows);
    for (std::size_t r = 0; r < rows; ++r) {
        if (lo[r] > hi[r])
            continue;
        extremes.push_back({lo[r], y0 + static_cast<int>(r)});
        if (hi[r] != lo[r])
            extremes.push_back({hi[r], y0 + static_cast<int>(r)});
    }
    return hull_diameter_squared(convex_hull(std::move(extremes)));
}

inline double feret_diameter(const Component& c)
{
    return std::sqrt(static_cast<double>(feret_squared(c.pixels)));
}

/// T = 4A / (pi P^2); defined as 0 when P = 0. Not clamped to 1.
inline double circularity(long long area, double feret) noexcept
{
    if (feret <= 0.0)
        return 0.0;
    return 4.0 * static_cast<double>(area) / (std::numbers::pi * feret * feret);
}

inline double circularity(const Component& c) noexcept
{
    return circularity(c.area, c.feret);
}

namespace detail {

inline int find_root(std::vector<int>& parent, int a)
{
    while (parent[static_cast<std::size_t>(a)] != a) {
        parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        a = parent[static_cast<std::size_t>(a)];
    }
    return a;
}

inline void unite(std::vector<int>& parent, int a, int b)
{
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b)
        return;
    // Smaller provisional label wins, so a root is always the label of the
    // component's first pixel in raster order.
    if (a < b)
        parent[static_cast<std::size_t>(b)] = a;
    else
        parent[static_cast<std::size_t>(a)] = b;
}

} // namespace detail

/// Two-pass union-find labeling. Labels run 1..n in raster order of each
/// component's first pixel; shape statistics are filled in.
inline ComponentSet label_components(const BinaryImage& bin, int connectivity = kDefaultConnectivity)
{
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connectivity must be 4 or 8");
    const int width = bin.width();
    const int height = bin.height();

    Raster<std::int32_t> provisional(width, height, 0);
    std::vector<int> parent{0};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!bin(x, y))
                continue;
            // Already-visited neighbours: W, NW, N, NE.
            int found = 0;
            auto visit = [&](int nx, int ny) {
                if (!bin.contains(nx, ny))
                    return;
                const int l = provisional(nx, ny);
                if (!l)
                    return;
                if (!found)
                    found = l;
                else
                    detail::unite(parent, found, l);
            };
            visit(x - 1, y);
            visit(x, y - 1);
            if (connectivity == 8) {
                visit(x - 1, y - 1);
                visit(x + 1, y - 1);
            }
            if (!found) {
                found = static_cast<int>(parent.size());
                parent.push_back(found);
            }
            provisional(x, y) = found;
        }
    }

    ComponentSet set;
    set.connectivity = connectivity;
    set.labels = Raster<std::int32_t>(width, height, 0);
    std::vector<int> final_label(parent.size(), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int p = provisional(x, y);
            if (!p)
                continue;
            const auto root = static_cast<std::size_t>(detail::find_root(parent, p));
            if (!final_label[root]) {
                final_label[root] = static_cast<int>(set.components.size()) + 1;
                set.components.push_back({});
                set.components.back().label = final_label[root];
            }
            set.labels(x, y) = final_label[root];
            set.components[static_cast<std::size_t>(final_label[root] - 1)].pixels.push_back({x, y});
        }
    }

    for (auto& c : set.components) {
        c.area = static_cast<long long>(c.pixels.size());
        double sx = 0.0;
        double sy = 0.0;
        for (const auto& p : c.pixels) {
            sx += p.x;
            sy += p.y;
        }
        c.centroid = {sx / static_cast<double>(c.area), sy / static_cast<double>(c.area)};
        c.feret = feret_diameter(c);
        c.circularity = circularity(c);
    }
    return set;
}

inline int round_half_up(double v) noexcept
{
    return static_cast<int>(std::floor(v + 0.5));
}

/// Keeps components with area_min < A < area_max and T >= circ_min, then
/// returns the largest (ties: higher T, then smaller label).
inline std::optional<MaculaCandidate> select_macula(const ComponentSet& set,
                                                    long long area_min = kDefaultAreaMin,
                                                    long long area_max = kDefaultAreaMax,
                                                    double circ_min = kDefaultCircularityMin)
{
    if (area_min >= area_max)
        throw std::invalid_argument("area_min must be below area_max");
    if (circ_min < 0.0 || circ_min > 1.0)
        throw std::invalid_argument("circularity floor must lie in [0, 1]");

    const Component* best = nullptr;
    for (const auto& c : set.components) {
        if (c.area <= area_min || c.area >= area_max || c.circularity < circ_min)
            continue;
        if (!best || c.area > best->area
            || (c.area == best->area
                && (c.circularity > best->circularity
                    || (c.circularity == best->circularity && c.label < best->label))))
            best = &c;
    }
    if (!best)
        return std::nullopt;
    return MaculaCandidate{*best, {round_half_up(best->centroid.x), round_half_up(best->centroid.y)}};
}

} // namespace fovea
