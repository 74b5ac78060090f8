#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

/// Synthetic fundus: flat field of view on black, a dark Gaussian macula,
/// a bright optic disc and straight dark vessels leaving the disc.
struct PhantomSpec
{
    int width = 700;
    int height = 1050;
    double fov_level = 140.0;
    /// Field-of-view radius as a fraction of min(width, height) / 2.
    double fov_fraction = 0.92;
    double macula_sigma = 18.0;
    double macula_depth = 60.0;
    double disc_radius = 45.0;
    double disc_level = 180.0;
    int vessel_count = 3;
    int vessel_width = 3;
    double vessel_level = 100.0;
    double noise_sigma = 5.0;
};

struct Phantom
{
    RgbImage image;
    PointF macula;
    PointF disc;
};

namespace detail {

/// Distance from p to the segment [a, b].
inline double segment_distance(PointF p, PointF a, PointF b)
{
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * vx);
    const double dy = p.y - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace detail

/// Deterministic for a given spec and seed (within one standard library).
inline Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    const PointF center{(spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
    const double fov_radius = spec.fov_fraction * std::min(spec.width, spec.height) / 2.0;

    // Macula near the middle, disc on a random side about 2.5 disc
    // diameters away, as on a real fundus.
    Phantom ph;
    const double macula_spread = 0.25 * fov_radius;
    ph.macula = {center.x + (2.0 * unit(rng) - 1.0) * macula_spread,
                 center.y + (2.0 * unit(rng) - 1.0) * macula_spread};
    const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double disc_dist = std::min(5.0 * spec.disc_radius, fov_radius - spec.disc_radius - 10.0);
    const double disc_tilt = (2.0 * unit(rng) - 1.0) * 0.3;
    ph.disc = {ph.macula.x + side * disc_dist * std::cos(disc_tilt), ph.macula.y + disc_dist * std::sin(disc_tilt)};

    struct Segment
    {
        PointF a;
        PointF b;
    };
    std::vector<Segment> vessels;
    for (int i = 0; i < spec.vessel_count; ++i) {
        const double angle = unit(rng) * 2.0 * std::numbers::pi;
        const double len = 2.0 * fov_radius;
        vessels.push_back({ph.disc, {ph.disc.x + len * std::cos(angle), ph.disc.y + len * std::sin(angle)}});
    }
    const double half_width = spec.vessel_width / 2.0;

    ph.image = RgbImage(spec.width, spec.height);
    const double two_sigma2 = 2.0 * spec.macula_sigma * spec.macula_sigma;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const PointF p{static_cast<double>(x), static_cast<double>(y)};
            const double rc = std::hypot(p.x - center.x, p.y - center.y);
            if (rc > fov_radius) {
                ph.image(x, y) = Rgb{0, 0, 0};
                continue;
            }
            double level = spec.fov_level;
            const double rm2 = (p.x - ph.macula.x) * (p.x - ph.macula.x) + (p.y - ph.macula.y) * (p.y - ph.macula.y);
            level -= spec.macula_depth * std::exp(-rm2 / two_sigma2);
            if (std::hypot(p.x - ph.disc.x, p.y - ph.disc.y) <= spec.disc_radius) {
                level = spec.disc_level;
            } else {
                for (const auto& v : vessels) {
                    if (detail::segment_distance(p, v.a, v.b) < half_width) {
                        level = std::min(level, spec.vessel_level);
                        break;
                    }
                }
            }
            level += spec.noise_sigma * noise(rng);
            // Keep inside-FOV pixels above the black border level.
            const auto v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(level)), 20, 255));
            ph.image(x, y) = Rgb{v, v, v};
        }
    }
    return ph;
}

} // namespace fovea
