#ifndef PHOENIXMAP_DENSITY_HPP
#define PHOENIXMAP_DENSITY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "phoenixmap/curve.hpp"
#include "phoenixmap/error.hpp"
#include "phoenixmap/geometry.hpp"

namespace phoenixmap {

struct InscribedCircle {
    Point2 center;
    double radius = 0.0;
};

namespace detail {

/// Radius of the circle tangent at v (inward normal n) passing through q;
/// +inf when q lies on or behind the tangent line.
inline double tangent_circle_radius(Point2 v, Point2 n, Point2 q) noexcept
{
    const Point2 d = q - v;
    const double h = dot(d, n);
    if (h <= 0.0)
        return std::numeric_limits<double>::infinity();
    return norm2(d) / (2.0 * h);
}

} // namespace detail

/// Largest circle tangent to the curve at divisor i whose center lies on the
/// inward normal and which does not cross the curve.
///
/// A circle of radius t centred at v + t*n contains a curve point q exactly
/// when t exceeds |q - v|^2 / (2 (q - v).n), so the maximal radius is the
/// minimum of that ratio over the curve, bounded by the local radius of
/// curvature at v. The minimum is searched over the flattened samples by
/// growing grid rings (the ratio is at least |q - v| / 2) and then refined on
/// the exact curve around the best sample.
inline InscribedCircle inscribed_circle_at(
    const ClosedCurve& curve, const CurveIndex& index, const SegmentedCurve& segmented, std::size_t i)
{
    const Point2 v = segmented.divisors.at(i);
    const Point2 n = segmented.inward_normals[i];
    const double kappa = segmented.inward_curvature[i];
    const double diag = index.diagonal();
    // Closer than this the ratio is mostly round-off (the error grows like
    // 1/|q - v|^2); its limit 1/kappa is already the starting bound.
    const double near2 = (1e-4 * diag) * (1e-4 * diag);
    const auto samples = index.samples();

    double best = kappa > 0.0 ? 1.0 / kappa : std::numeric_limits<double>::infinity();
    std::optional<std::size_t> best_sample;
    for (std::size_t ring = 0;; ++ring) {
        const double reach = ring == 0 ? 0.0 : static_cast<double>(ring - 1) * index.cell_size();
        if (2.0 * best <= reach)
            break;
        const bool any = index.visit_ring(v, ring, [&](std::size_t s) {
            const Point2 d = samples[s] - v;
            if (norm2(d) < near2)
                return;
            const double r = detail::tangent_circle_radius(v, n, samples[s]);
            if (r < best) {
                best = r;
                best_sample = s;
            }
        });
        if (!any)
            break;
    }

    if (best_sample && distance(samples[*best_sample], v) > 1e-4 * diag) {
        // Golden-section search over the parameter interval around the sample.
        const auto params = index.sample_params();
        const std::size_t m = samples.size();
        const std::size_t s = *best_sample;
        const double pieces = static_cast<double>(curve.size());
        double lo = params[(s + m - 1) % m];
        double hi = params[(s + 1) % m];
        const double mid = params[s];
        if (lo > mid)
            lo -= pieces;
        if (hi < mid)
            hi += pieces;
        auto f = [&](double u) {
            const Point2 q = curve.eval(curve.at_parameter(u));
            return norm2(q - v) < near2 ? best : detail::tangent_circle_radius(v, n, q);
        };
        constexpr double inv_phi = 0.6180339887498949;
        double a = lo, b = hi;
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = f(c), fd = f(d);
        for (int iter = 0; iter < 80 && (b - a) > 1e-15 * pieces; ++iter) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        best = std::min({best, fc, fd});
    }

    if (!std::isfinite(best) || !(best > 0.0))
        throw Error(ErrorCode::DegenerateNormal, "no interior circle at divisor " + std::to_string(i));
    return {v + best * n, best};
}

inline std::vector<InscribedCircle> inscribed_circles(
    const ClosedCurve& curve, const CurveIndex& index, const SegmentedCurve& segmented)
{
    std::vector<InscribedCircle> out;
    out.reserve(segmented.size());
    for (std::size_t i = 0; i < segmented.size(); ++i)
        out.push_back(inscribed_circle_at(curve, index, segmented, i));
    return out;
}

namespace detail {

inline bool segments_cross_properly(Point2 p1, Point2 p2, Point2 q1, Point2 q2) noexcept
{
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

inline bool in_triangle(Point2 p, Point2 a, Point2 b, Point2 c) noexcept
{
    const double d1 = cross(b - a, p - a);
    const double d2 = cross(c - b, p - b);
    const double d3 = cross(a - c, p - c);
    const bool has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    const bool has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    return !(has_neg && has_pos);
}

inline double triangle_area(Point2 a, Point2 b, Point2 c) noexcept { return 0.5 * std::abs(cross(b - a, c - a)); }

} // namespace detail

/// Counting cell for curve segment i: the quad (v_i, v_{i+1}, o_{i+1}, o_i).
/// A self-intersecting quad is treated as the two triangles
/// (v_i, v_{i+1}, o_{i+1}) and (v_i, o_{i+1}, o_i).
struct SegmentSlice {
    std::size_t index = 0;
    std::array<Point2, 4> quad;
    bool split = false;
    double area = 0.0;
    std::size_t count = 0;
    double density = 0.0;

    bool contains(Point2 p) const noexcept
    {
        if (split)
            return detail::in_triangle(p, quad[0], quad[1], quad[2]) || detail::in_triangle(p, quad[0], quad[2], quad[3]);
        return point_in_polygon(p, quad, 0.0) != Location::Outside;
    }
};

/// Area of a slice-shaped quad under the same split rule as SegmentSlice.
inline double quad_region_area(const std::array<Point2, 4>& q, bool* split = nullptr) noexcept
{
    const bool crossed = detail::segments_cross_properly(q[0], q[1], q[2], q[3])
        || detail::segments_cross_properly(q[1], q[2], q[3], q[0]);
    if (split)
        *split = crossed;
    if (crossed)
        return detail::triangle_area(q[0], q[1], q[2]) + detail::triangle_area(q[0], q[2], q[3]);
    return polygon_area(q);
}

struct SliceSet {
    std::vector<SegmentSlice> slices;
    /// Slice index per input point, or -1 for points outside the curve.
    std::vector<long> assignment;
    std::size_t points_inside = 0;
};

/// Builds the n slices and assigns every point inside the curve to exactly
/// one of them: the lowest-index slice containing it, else the slice whose
/// segment midpoint is nearest.
inline SliceSet build_slices(const SegmentedCurve& segmented, std::span<const InscribedCircle> circles,
    std::span<const Point2> points, const CurveIndex& index)
{
    const std::size_t n = segmented.size();
    if (circles.size() != n)
        throw Error(ErrorCode::InvalidConfig, "one inscribed circle per divisor is required");
    SliceSet out;
    out.slices.resize(n);
    const double diag = index.diagonal();
    BoundingBox all;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = segmented.next(i);
        SegmentSlice& s = out.slices[i];
        s.index = i;
        s.quad = {segmented.divisors[i], segmented.divisors[j], circles[j].center, circles[i].center};
        s.area = std::max(quad_region_area(s.quad, &s.split), 1e-6 * diag * segmented.arc_lengths[i]);
        for (const auto& q : s.quad)
            all.expand(q);
    }

    // Bucket slices by bounding box for the first-match scan.
    const auto cells_per_side = static_cast<std::size_t>(std::clamp(std::sqrt(static_cast<double>(n)), 8.0, 256.0));
    const double cell = std::max(std::max(all.width(), all.height()) / static_cast<double>(cells_per_side), 1e-300);
    const std::size_t nx = static_cast<std::size_t>(all.width() / cell) + 1;
    const std::size_t ny = static_cast<std::size_t>(all.height() / cell) + 1;
    auto col = [&](double x) { return std::min(nx - 1, static_cast<std::size_t>(std::max(0.0, (x - all.min.x) / cell))); };
    auto row = [&](double y) { return std::min(ny - 1, static_cast<std::size_t>(std::max(0.0, (y - all.min.y) / cell))); };
    std::vector<std::vector<std::size_t>> buckets(nx * ny);
    for (std::size_t i = 0; i < n; ++i) {
        const BoundingBox b = bounding_box(out.slices[i].quad);
        for (std::size_t r = row(b.min.y); r <= row(b.max.y); ++r)
            for (std::size_t c = col(b.min.x); c <= col(b.max.x); ++c)
                buckets[r * nx + c].push_back(i);
    }

    std::vector<Point2> midpoints(n);
    for (std::size_t i = 0; i < n; ++i)
        midpoints[i] = 0.5 * (segmented.divisors[i] + segmented.divisors[segmented.next(i)]);

    out.assignment.assign(points.size(), -1);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Point2 p = points[k];
        if (!index.contains(p))
            continue;
        ++out.points_inside;
        long owner = -1;
        if (p.x >= all.min.x && p.x <= all.max.x && p.y >= all.min.y && p.y <= all.max.y) {
            for (std::size_t i : buckets[row(p.y) * nx + col(p.x)]) {
                if ((owner < 0 || static_cast<long>(i) < owner) && out.slices[i].contains(p))
                    owner = static_cast<long>(i);
            }
        }
        if (owner < 0) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double d = norm2(midpoints[i] - p);
                if (d < best) {
                    best = d;
                    owner = static_cast<long>(i);
                }
            }
        }
        out.assignment[k] = owner;
        ++out.slices[static_cast<std::size_t>(owner)].count;
    }
    for (auto& s : out.slices)
        s.density = static_cast<double>(s.count) / s.area;
    return out;
}

/// Per-segment widths: raw slice densities, their area-weighted circular
/// moving average, and the same values multiplied by the width scale.
struct WidthProfile {
    std::vector<double> raw;
    std::vector<double> smoothed;
    std::vector<double> widths;
    double scale = 1.0;
    std::size_t window = 1;

    std::size_t size() const noexcept { return raw.size(); }
};

/// w'_i = sum(w_k A_k) / sum(A_k) over k in [i - x, i + x), indices modulo n.
inline WidthProfile smooth_widths(std::span<const SegmentSlice> slices, std::size_t x)
{
    const std::size_t n = slices.size();
    if (x < 1 || 2 * x > n)
        throw Error(ErrorCode::BadWindow,
            "window half-size must lie in [1, " + std::to_string(n / 2) + "], got " + std::to_string(x));
    WidthProfile out;
    out.window = x;
    out.raw.resize(n);
    out.smoothed.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.raw[i] = slices[i].density;
    for (std::size_t i = 0; i < n; ++i) {
        double weighted = 0.0;
        double area = 0.0;
        for (std::size_t off = 0; off < 2 * x; ++off) {
            const std::size_t k = (i + n - x + off) % n;
            weighted += slices[k].density * slices[k].area;
            area += slices[k].area;
        }
        out.smoothed[i] = area > 0.0 ? weighted / area : 0.0;
    }
    out.widths = out.smoothed;
    return out;
}

/// Multiplies the smoothed densities by c to obtain render widths.
inline WidthProfile scale_widths(WidthProfile profile, double c)
{
    if (!(c > 0.0) || !std::isfinite(c))
        throw Error(ErrorCode::NonPositiveScale, "width scale must be positive");
    profile.scale = c;
    profile.widths.resize(profile.smoothed.size());
    for (std::size_t i = 0; i < profile.smoothed.size(); ++i)
        profile.widths[i] = profile.smoothed[i] * c;
    return profile;
}

/// Scale that maps the largest density to max_width; 1 when every density is 0.
inline double auto_scale(double max_density, double max_width)
{
    if (!(max_width > 0.0))
        throw Error(ErrorCode::NonPositiveScale, "maximum width must be positive");
    return max_density > 0.0 ? max_width / max_density : 1.0;
}

inline WidthProfile scale_widths_to(WidthProfile profile, double max_width)
{
    const double peak = profile.smoothed.empty() ? 0.0 : *std::max_element(profile.smoothed.begin(), profile.smoothed.end());
    return scale_widths(std::move(profile), auto_scale(peak, max_width));
}

} // namespace phoenixmap

#endif
