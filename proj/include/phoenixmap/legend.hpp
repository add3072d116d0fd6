#ifndef PHOENIXMAP_LEGEND_HPP
#define PHOENIXMAP_LEGEND_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "phoenixmap/density.hpp"
#include "phoenixmap/geometry.hpp"

namespace phoenixmap {

struct WidthBar {
    double width = 0.0;
    double density = 0.0;
    std::string label;
};

struct LegendSpec {
    /// Bin 0 is the center side of the slices, the last bin the outline side.
    std::vector<double> radial_profile;
    std::vector<WidthBar> width_bars;
    std::string units_name = "SQU";
    std::string title;
    std::string color = "#000000";
};

namespace detail {

/// Fraction along the slice from its center edge (0) to its outline edge (1)
/// of the interpolated cross-line through p.
inline double slice_depth(const SegmentSlice& s, Point2 p) noexcept
{
    // Cross-line at depth l joins a(l) = o_i + l (v_i - o_i) and b(l) = o_j + l (v_j - o_j).
    const Point2 vi = s.quad[0], vj = s.quad[1], oj = s.quad[2], oi = s.quad[3];
    const Point2 e0 = oj - oi;
    const Point2 g = vi - oi;
    const Point2 de = (vj - oj) - g;
    const Point2 q = p - oi;
    const double a = -cross(de, g);
    const double b = cross(de, q) - cross(e0, g);
    const double c = cross(e0, q);
    std::array<double, 2> roots{};
    int count = 0;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    if (std::abs(a) <= 1e-12 * scale) {
        if (std::abs(b) > 0.0)
            roots[count++] = -c / b;
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double qq = -0.5 * (b + std::copysign(sq, b));
            roots[count++] = qq / a;
            if (qq != 0.0)
                roots[count++] = c / qq;
        }
    }
    // A root only counts when p lies within the cross-line segment at that
    // depth; near-degenerate center edges produce spurious roots near 0.
    auto along = [&](double l) {
        const Point2 a0 = oi + l * g;
        const Point2 ab = (oj + l * (vj - oj)) - a0;
        const double len2 = norm2(ab);
        return len2 > 0.0 ? dot(p - a0, ab) / len2 : 0.0;
    };
    double chosen = -1.0;
    double best_miss = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const double r = roots[k];
        if (!(r >= -1e-9 && r <= 1.0 + 1e-9))
            continue;
        const double t = along(r);
        const double miss = std::max({0.0, -t, t - 1.0});
        if (miss < best_miss) {
            best_miss = miss;
            chosen = r;
        }
    }
    if (best_miss > 1e-6)
        chosen = -1.0;
    if (chosen < 0.0) {
        const double to_center = distance_to_segment(p, oi, oj);
        const double to_edge = distance_to_segment(p, vi, vj);
        chosen = to_edge < to_center ? 1.0 : 0.0;
    }
    return std::clamp(chosen, 0.0, 1.0);
}

inline std::array<Point2, 4> sub_quad(const SegmentSlice& s, double l0, double l1) noexcept
{
    const Point2 vi = s.quad[0], vj = s.quad[1], oj = s.quad[2], oi = s.quad[3];
    return {lerp(oi, vi, l1), lerp(oj, vj, l1), lerp(oj, vj, l0), lerp(oi, vi, l0)};
}

} // namespace detail

/// Areas of the m sub-sections summed over all slices (the weights behind
/// radial_profile).
inline std::vector<double> radial_bin_areas(std::span<const SegmentSlice> slices, std::size_t m)
{
    std::vector<double> area(m, 0.0);
    for (const auto& s : slices)
        for (std::size_t j = 0; j < m; ++j)
            area[j] += quad_region_area(detail::sub_quad(s, static_cast<double>(j) / m, static_cast<double>(j + 1) / m));
    return area;
}

/// Average density from the center side to the outline side: each slice is
/// cut into m sub-sections by interpolating between its center edge and its
/// outline edge, and bin j holds sum(count) / sum(area) of sub-section j over
/// all slices.
inline std::vector<double> radial_profile(
    std::span<const SegmentSlice> slices, std::span<const Point2> points, std::span<const long> assignment, std::size_t m)
{
    if (m < 2)
        throw Error(ErrorCode::InvalidConfig, "legend needs at least 2 bins");
    if (assignment.size() != points.size())
        throw Error(ErrorCode::InvalidConfig, "assignment does not match the point set");
    const auto area = radial_bin_areas(slices, m);
    std::vector<double> count(m, 0.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (assignment[k] < 0)
            continue;
        const double depth = detail::slice_depth(slices[static_cast<std::size_t>(assignment[k])], points[k]);
        const auto bin = std::min(m - 1, static_cast<std::size_t>(depth * static_cast<double>(m)));
        count[bin] += 1.0;
    }
    std::vector<double> profile(m);
    for (std::size_t j = 0; j < m; ++j)
        profile[j] = area[j] > 0.0 ? count[j] / area[j] : 0.0;
    return profile;
}

/// Smallest value of the form {1, 2, 2.5, 5} * 10^k that is >= v.
inline double nice_ceil(double v)
{
    if (!(v > 0.0))
        return 0.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        const double candidate = f * mag;
        if (candidate >= v * (1.0 - 1e-12))
            return candidate;
    }
    return 10.0 * mag;
}

inline std::string format_density(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// `count` reference bars at multiples of a round step reaching the largest
/// smoothed density; each is drawn at width density * scale.
inline std::vector<WidthBar> width_bars(const WidthProfile& profile, std::size_t count, const std::string& units = "SQU")
{
    if (count < 1)
        throw Error(ErrorCode::InvalidConfig, "at least one width bar is required");
    std::vector<WidthBar> bars;
    if (profile.smoothed.empty())
        return bars;
    const double peak = *std::max_element(profile.smoothed.begin(), profile.smoothed.end());
    const double step = nice_ceil(peak / static_cast<double>(count));
    if (!(step > 0.0))
        return bars;
    for (std::size_t k = 1; k <= count; ++k) {
        const double density = step * static_cast<double>(k);
        bars.push_back({density * profile.scale, density, format_density(density) + " P / " + units});
    }
    return bars;
}

} // namespace phoenixmap

#endif
