// Independent reference implementations used as test oracles. Nothing here
// calls into the library under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "phoenixmap/geometry.hpp"

namespace oracle {

using phoenixmap::Point2;

/// Winding number of a closed ring around p (nonzero means inside).
inline int winding_number(Point2 p, const std::vector<Point2>& ring)
{
    int wn = 0;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % m];
        const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if (a.y <= p.y) {
            if (b.y > p.y && side > 0)
                ++wn;
        } else if (b.y <= p.y && side < 0) {
            --wn;
        }
    }
    return wn;
}

inline double segment_distance(Point2 p, Point2 a, Point2 b)
{
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

inline double boundary_distance(Point2 p, const std::vector<Point2>& ring)
{
    double best = INFINITY;
    for (std::size_t i = 0; i < ring.size(); ++i)
        best = std::min(best, segment_distance(p, ring[i], ring[(i + 1) % ring.size()]));
    return best;
}

/// Inside, or within tol of the boundary.
inline bool covers(const std::vector<Point2>& ring, Point2 p, double tol)
{
    return winding_number(p, ring) != 0 || boundary_distance(p, ring) <= tol;
}

inline double shoelace(const std::vector<Point2>& ring)
{
    double s = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % ring.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

/// Closed-segment intersection via exact orientation signs.
inline bool segments_meet(Point2 p1, Point2 p2, Point2 q1, Point2 q2)
{
    auto orient = [](Point2 a, Point2 b, Point2 c) {
        const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        return (v > 0) - (v < 0);
    };
    auto within = [](Point2 a, Point2 b, Point2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y
            && c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2), o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    return (o1 == 0 && within(p1, p2, q1)) || (o2 == 0 && within(p1, p2, q2)) || (o3 == 0 && within(q1, q2, p1))
        || (o4 == 0 && within(q1, q2, p2));
}

/// Exhaustive O(m^2) check over non-adjacent edge pairs.
inline bool ring_is_simple(const std::vector<Point2>& ring)
{
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            if (j == i + 1 || (i == 0 && j == m - 1))
                continue;
            if (segments_meet(ring[i], ring[(i + 1) % m], ring[j], ring[(j + 1) % m]))
                return false;
        }
    return true;
}

inline std::vector<Point2> circle_ring(Point2 c, double r, std::size_t m)
{
    std::vector<Point2> out;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
        out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return out;
}

/// Uniform samples from a "C" shaped band: an annulus sector missing the
/// wedge around the +x axis.
inline std::vector<Point2> c_shape(std::size_t count, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> rad(0.6, 1.0), ang(0.6, 2.0 * std::numbers::pi - 0.6);
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = rad(rng), a = ang(rng);
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return pts;
}

inline std::vector<Point2> uniform_box(std::size_t count, unsigned seed, double w = 1.0, double h = 1.0)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = ux(rng);
        pts.push_back({x, uy(rng)});
    }
    return pts;
}

inline std::vector<Point2> uniform_disc(std::size_t count, unsigned seed, Point2 c, double r)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < count; ++i) {
        const double rr = r * std::sqrt(u(rng));
        const double a = 2.0 * std::numbers::pi * u(rng);
        pts.push_back({c.x + rr * std::cos(a), c.y + rr * std::sin(a)});
    }
    return pts;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k)
                r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace oracle
