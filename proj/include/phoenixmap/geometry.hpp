#ifndef PHOENIXMAP_GEOMETRY_HPP
#define PHOENIXMAP_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phoenixmap/error.hpp"

namespace phoenixmap {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator/(Point2 a, double s) noexcept { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Point2 a, Point2 b) noexcept = default;
    constexpr Point2& operator+=(Point2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Point2& operator-=(Point2 o) noexcept { x -= o.x; y -= o.y; return *this; }
};

constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) noexcept { return std::hypot(a.x, a.y); }
constexpr double norm2(Point2 a) noexcept { return dot(a, a); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }
constexpr Point2 lerp(Point2 a, Point2 b, double t) noexcept { return a + t * (b - a); }
/// Counter-clockwise quarter turn.
constexpr Point2 perp(Point2 a) noexcept { return {-a.y, a.x}; }

inline Point2 normalized(Point2 a) noexcept
{
    const double len = norm(a);
    return len > 0.0 ? a / len : Point2{};
}

inline bool is_finite(Point2 p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

struct BoundingBox {
    Point2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void expand(Point2 p) noexcept
    {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }
    void expand(const BoundingBox& o) noexcept
    {
        if (o.empty())
            return;
        expand(o.min);
        expand(o.max);
    }
    bool empty() const noexcept { return min.x > max.x; }
    double width() const noexcept { return empty() ? 0.0 : max.x - min.x; }
    double height() const noexcept { return empty() ? 0.0 : max.y - min.y; }
    double diagonal() const noexcept { return empty() ? 0.0 : std::hypot(width(), height()); }
    Point2 center() const noexcept { return 0.5 * (min + max); }
};

inline BoundingBox bounding_box(std::span<const Point2> pts) noexcept
{
    BoundingBox box;
    for (const auto& p : pts)
        box.expand(p);
    return box;
}

/// Observations of one distribution. Duplicates are allowed.
struct PointSet {
    std::vector<Point2> points;
    std::optional<std::string> series_label;
    std::optional<std::string> time_label;

    std::size_t size() const noexcept { return points.size(); }
};

/// Simple counter-clockwise polygon; the closing edge is implicit.
class Outline {
public:
    Outline() = default;

    /// Validates a ring read from user input: drops a repeated closing vertex
    /// and consecutive duplicates, rejects self-intersections, re-orients to CCW.
    static Outline validated(std::vector<Point2> ring);

    /// Wraps a ring already known to be simple and CCW.
    static Outline trusted(std::vector<Point2> ring) noexcept
    {
        Outline o;
        o.vertices_ = std::move(ring);
        return o;
    }

    std::span<const Point2> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Point2& operator[](std::size_t i) const noexcept { return vertices_[i]; }
    BoundingBox bbox() const noexcept { return bounding_box(vertices_); }

private:
    std::vector<Point2> vertices_;
};

inline double signed_area(std::span<const Point2> ring) noexcept
{
    const std::size_t m = ring.size();
    if (m < 3)
        return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0, j = m - 1; i < m; j = i++)
        twice += cross(ring[j], ring[i]);
    return 0.5 * twice;
}

inline double polygon_area(std::span<const Point2> ring) noexcept { return std::abs(signed_area(ring)); }
inline double polygon_area(const Outline& poly) noexcept { return polygon_area(poly.vertices()); }

inline double perimeter(std::span<const Point2> ring) noexcept
{
    double len = 0.0;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
        len += distance(ring[j], ring[i]);
    return len;
}

inline double distance_to_segment(Point2 p, Point2 a, Point2 b) noexcept
{
    const Point2 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 == 0.0)
        return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

namespace detail {

inline int orientation(Point2 a, Point2 b, Point2 c) noexcept
{
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Point2 a, Point2 b, Point2 p) noexcept
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y
        && p.y <= std::max(a.y, b.y);
}

} // namespace detail

/// Closed-segment intersection test; touching and collinear overlap count.
inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) noexcept
{
    using detail::on_segment;
    using detail::orientation;
    if (std::max(p1.x, p2.x) < std::min(q1.x, q2.x) || std::max(q1.x, q2.x) < std::min(p1.x, p2.x)
        || std::max(p1.y, p2.y) < std::min(q1.y, q2.y) || std::max(q1.y, q2.y) < std::min(p1.y, p2.y))
        return false;
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1))
        return true;
    if (o2 == 0 && on_segment(p1, p2, q2))
        return true;
    if (o3 == 0 && on_segment(q1, q2, p1))
        return true;
    if (o4 == 0 && on_segment(q1, q2, p2))
        return true;
    return false;
}

/// Exhaustive check that no two non-adjacent edges of the closed ring meet
/// and adjacent edges share only their common vertex.
inline bool is_simple(std::span<const Point2> ring)
{
    const std::size_t m = ring.size();
    if (m < 3)
        return false;
    std::vector<BoundingBox> boxes(m);
    for (std::size_t i = 0; i < m; ++i) {
        boxes[i].expand(ring[i]);
        boxes[i].expand(ring[(i + 1) % m]);
        if (ring[i] == ring[(i + 1) % m])
            return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = ring[i];
        const Point2 b = ring[(i + 1) % m];
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == m - 1);
            const BoundingBox& bj = boxes[j];
            if (bj.max.x < boxes[i].min.x || bj.min.x > boxes[i].max.x || bj.max.y < boxes[i].min.y
                || bj.min.y > boxes[i].max.y)
                continue;
            const Point2 c = ring[j];
            const Point2 d = ring[(j + 1) % m];
            if (adjacent) {
                // Shared vertex is fine; folding back over the neighbour is not.
                const Point2 shared = (j == i + 1) ? b : a;
                const Point2 u = (j == i + 1) ? a : b;
                const Point2 w = (j == i + 1) ? d : c;
                if (detail::orientation(u, shared, w) == 0 && dot(u - shared, w - shared) > 0.0)
                    return false;
                continue;
            }
            if (segments_intersect(a, b, c, d))
                return false;
        }
    }
    return true;
}

enum class Location { Inside, Boundary, Outside };

/// Even-odd containment with an absolute boundary tolerance.
inline Location point_in_polygon(Point2 p, std::span<const Point2> ring, double boundary_eps) noexcept
{
    const std::size_t m = ring.size();
    bool inside = false;
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Point2 a = ring[j];
        const Point2 b = ring[i];
        if (distance_to_segment(p, a, b) <= boundary_eps)
            return Location::Boundary;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc)
                inside = !inside;
        }
    }
    return inside ? Location::Inside : Location::Outside;
}

/// Boundary tolerance is 1e-12 of the polygon's bounding-box diagonal.
inline Location point_in_polygon(Point2 p, const Outline& poly) noexcept
{
    return point_in_polygon(p, poly.vertices(), 1e-12 * poly.bbox().diagonal());
}

inline Outline Outline::validated(std::vector<Point2> ring)
{
    for (const auto& p : ring)
        if (!is_finite(p))
            throw Error(ErrorCode::NonFiniteCoordinate, "outline vertex is not finite");
    std::vector<Point2> clean;
    clean.reserve(ring.size());
    for (const auto& p : ring)
        if (clean.empty() || !(clean.back() == p))
            clean.push_back(p);
    while (clean.size() > 1 && clean.front() == clean.back())
        clean.pop_back();
    if (clean.size() < 3)
        throw Error(ErrorCode::TooFewVertices, "outline needs at least 3 distinct vertices, got "
                + std::to_string(clean.size()));
    if (!is_simple(clean) || signed_area(clean) == 0.0)
        throw Error(ErrorCode::SelfIntersectingOutline, "outline ring is not a simple polygon");
    if (signed_area(clean) < 0.0)
        std::reverse(clean.begin(), clean.end());
    return trusted(std::move(clean));
}

namespace detail {

inline std::vector<Point2> unique_points(std::span<const Point2> pts)
{
    std::vector<Point2> out(pts.begin(), pts.end());
    std::sort(out.begin(), out.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void require_hull_input(std::span<const Point2> unique, std::size_t raw_count)
{
    if (raw_count < 3)
        throw Error(ErrorCode::TooFewPoints, "need at least 3 points, got " + std::to_string(raw_count));
    for (const auto& p : unique)
        if (!is_finite(p))
            throw Error(ErrorCode::NonFiniteCoordinate, "hull input contains a non-finite point");
    if (unique.size() < 3)
        throw Error(ErrorCode::CollinearInput, "fewer than 3 distinct points");
    // Farthest pair from the first point spans the line; any offset from it breaks collinearity.
    const Point2 a = unique.front();
    const auto far = std::max_element(unique.begin(), unique.end(),
        [&](Point2 p, Point2 q) { return norm2(p - a) < norm2(q - a); });
    const Point2 dir = *far - a;
    const double scale = norm2(dir);
    for (const auto& p : unique)
        if (std::abs(cross(dir, p - a)) > 1e-12 * scale)
            return;
    throw Error(ErrorCode::CollinearInput, "all points lie on one line");
}

inline std::vector<Point2> monotone_chain(std::vector<Point2> pts)
{
    // pts sorted lexicographically and unique.
    const std::size_t m = pts.size();
    std::vector<Point2> hull(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = m - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Uniform-grid k-nearest-neighbour index with point removal.
class NeighbourGrid {
public:
    explicit NeighbourGrid(std::span<const Point2> pts)
        : pts_(pts.begin(), pts.end())
        , alive_(pts.size(), true)
    {
        box_ = bounding_box(pts_);
        const double area = std::max(box_.width() * box_.height(), 1e-300);
        cell_ = std::sqrt(2.0 * area / static_cast<double>(pts_.size()));
        if (!(cell_ > 0.0))
            cell_ = std::max(box_.diagonal(), 1.0);
        nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(box_.width() / cell_) + 1);
        ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(box_.height() / cell_) + 1);
        cells_.assign(nx_ * ny_, {});
        for (std::size_t i = 0; i < pts_.size(); ++i)
            cells_[cell_of(pts_[i])].push_back(i);
    }

    void remove(std::size_t i) noexcept { alive_[i] = false; }
    void restore(std::size_t i) noexcept { alive_[i] = true; }

    /// Indices of up to k live points nearest to p (excluding index `self`),
    /// ordered by distance then coordinates.
    std::vector<std::size_t> nearest(Point2 p, std::size_t k, std::size_t self) const
    {
        std::vector<std::pair<double, std::size_t>> found;
        const auto [cx, cy] = coords_of(p);
        const std::size_t max_ring = std::max(nx_, ny_);
        for (std::size_t ring = 0; ring <= max_ring; ++ring) {
            visit_ring(cx, cy, ring, [&](std::size_t cell) {
                for (std::size_t idx : cells_[cell])
                    if (alive_[idx] && idx != self)
                        found.emplace_back(norm2(pts_[idx] - p), idx);
            });
            if (found.size() >= k) {
                // Points beyond this ring are at least ring*cell away.
                std::nth_element(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(k - 1), found.end());
                const double reach = static_cast<double>(ring) * cell_;
                if (found[k - 1].first <= reach * reach)
                    break;
            }
        }
        auto less = [&](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
            if (a.first != b.first)
                return a.first < b.first;
            const Point2 pa = pts_[a.second], pb = pts_[b.second];
            return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
        };
        std::sort(found.begin(), found.end(), less);
        if (found.size() > k)
            found.resize(k);
        std::vector<std::size_t> out;
        out.reserve(found.size());
        for (const auto& f : found)
            out.push_back(f.second);
        return out;
    }

private:
    std::pair<std::size_t, std::size_t> coords_of(Point2 p) const noexcept
    {
        auto clampi = [](double v, std::size_t n) {
            if (!(v > 0.0))
                return std::size_t{0};
            return std::min(n - 1, static_cast<std::size_t>(v));
        };
        return {clampi((p.x - box_.min.x) / cell_, nx_), clampi((p.y - box_.min.y) / cell_, ny_)};
    }
    std::size_t cell_of(Point2 p) const noexcept
    {
        const auto [x, y] = coords_of(p);
        return y * nx_ + x;
    }
    template <class F>
    void visit_ring(std::size_t cx, std::size_t cy, std::size_t ring, F&& f) const
    {
        const auto lo_x = static_cast<std::ptrdiff_t>(cx) - static_cast<std::ptrdiff_t>(ring);
        const auto hi_x = static_cast<std::ptrdiff_t>(cx) + static_cast<std::ptrdiff_t>(ring);
        const auto lo_y = static_cast<std::ptrdiff_t>(cy) - static_cast<std::ptrdiff_t>(ring);
        const auto hi_y = static_cast<std::ptrdiff_t>(cy) + static_cast<std::ptrdiff_t>(ring);
        for (std::ptrdiff_t y = lo_y; y <= hi_y; ++y) {
            if (y < 0 || y >= static_cast<std::ptrdiff_t>(ny_))
                continue;
            const bool edge_row = (y == lo_y || y == hi_y);
            for (std::ptrdiff_t x = lo_x; x <= hi_x; x += (edge_row || ring == 0) ? 1 : (hi_x - lo_x)) {
                if (x >= 0 && x < static_cast<std::ptrdiff_t>(nx_))
                    f(static_cast<std::size_t>(y) * nx_ + static_cast<std::size_t>(x));
                if (ring == 0)
                    break;
            }
        }
    }

    std::vector<Point2> pts_;
    std::vector<bool> alive_;
    BoundingBox box_;
    double cell_ = 1.0;
    std::size_t nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

/// One attempt of the k-nearest-neighbour concave hull walk. Returns an empty
/// vector when the walk gets stuck or the ring fails containment.
inline std::vector<Point2> knn_hull_attempt(std::span<const Point2> pts, std::size_t k)
{
    const std::size_t m = pts.size();
    std::size_t first = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (pts[i].y < pts[first].y || (pts[i].y == pts[first].y && pts[i].x < pts[first].x))
            first = i;

    NeighbourGrid grid(pts);
    std::vector<std::size_t> hull{first};
    grid.remove(first);
    bool first_restored = false;
    std::size_t current = first;
    Point2 heading{1.0, 0.0};

    while (true) {
        if (!first_restored && hull.size() >= 3) {
            grid.restore(first);
            first_restored = true;
        }
        auto candidates = grid.nearest(pts[current], k, current);
        if (candidates.empty())
            return {};
        // Most clockwise turn first: that edge keeps the remaining points on its left.
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(candidates.size());
        for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
            const Point2 e = pts[candidates[rank]] - pts[current];
            double turn = std::atan2(cross(heading, e), dot(heading, e));
            if (turn <= -std::numbers::pi)
                turn = std::numbers::pi;
            order.emplace_back(turn, rank);
        }
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

        std::optional<std::size_t> chosen;
        for (const auto& [turn, rank] : order) {
            if (turn >= std::numbers::pi - 1e-12)
                continue;
            const std::size_t cand = candidates[rank];
            const bool closes = cand == first;
            const Point2 a = pts[current];
            const Point2 b = pts[cand];
            bool crosses = false;
            // Edges (hull[j], hull[j+1]); the last one shares `current`, the first one shares `first` when closing.
            const std::size_t edges = hull.size() - 1;
            for (std::size_t j = 0; j + 1 < edges && !crosses; ++j) {
                if (closes && j == 0)
                    continue;
                crosses = segments_intersect(a, b, pts[hull[j]], pts[hull[j + 1]]);
            }
            if (!crosses) {
                chosen = cand;
                break;
            }
        }
        if (!chosen)
            return {};
        if (*chosen == first)
            break;
        heading = pts[*chosen] - pts[current];
        current = *chosen;
        hull.push_back(current);
        grid.remove(current);
        if (hull.size() > m)
            return {};
    }

    std::vector<Point2> ring;
    ring.reserve(hull.size());
    for (std::size_t idx : hull)
        ring.push_back(pts[idx]);
    if (ring.size() < 3 || signed_area(ring) <= 0.0)
        return {};
    const double eps = 1e-12 * bounding_box(ring).diagonal();
    for (const auto& p : pts)
        if (point_in_polygon(p, ring, eps) == Location::Outside)
            return {};
    return ring;
}

} // namespace detail

inline Outline convex_hull(std::span<const Point2> points)
{
    auto unique = detail::unique_points(points);
    detail::require_hull_input(unique, points.size());
    return Outline::trusted(detail::monotone_chain(std::move(unique)));
}

inline Outline convex_hull(const PointSet& points) { return convex_hull(std::span<const Point2>(points.points)); }

/// k-nearest-neighbour concave hull (Moreira & Santos). k grows by one
/// whenever a walk gets stuck, self-intersects or leaves a point outside;
/// once k reaches the number of distinct points the convex hull is returned.
inline Outline concave_hull(std::span<const Point2> points, std::size_t k = 3)
{
    auto unique = detail::unique_points(points);
    detail::require_hull_input(unique, points.size());
    if (unique.size() == 3) {
        if (signed_area(unique) < 0.0)
            std::reverse(unique.begin(), unique.end());
        return Outline::trusted(std::move(unique));
    }
    for (std::size_t kk = std::max<std::size_t>(k, 3); kk < unique.size(); ++kk) {
        auto ring = detail::knn_hull_attempt(unique, kk);
        if (!ring.empty())
            return Outline::trusted(std::move(ring));
    }
    return Outline::trusted(detail::monotone_chain(std::move(unique)));
}

inline Outline concave_hull(const PointSet& points, std::size_t k = 3)
{
    return concave_hull(std::span<const Point2>(points.points), k);
}

/// Miter offset: every vertex moves outward by b along the bisector of its
/// adjacent edge normals, with the miter length capped at 4b.
namespace detail {

/// Vertex-wise miter offset of a CCW ring, without any validity checks.
inline std::vector<Point2> miter_offset(std::span<const Point2> ring, double b)
{
    const std::size_t m = ring.size();
    std::vector<Point2> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 prev = ring[(i + m - 1) % m];
        const Point2 cur = ring[i];
        const Point2 next = ring[(i + 1) % m];
        const Point2 d_in = normalized(cur - prev);
        const Point2 d_out = normalized(next - cur);
        // Outward normals of a CCW ring point right of travel.
        const Point2 n_in{d_in.y, -d_in.x};
        const Point2 n_out{d_out.y, -d_out.x};
        Point2 bisector = n_in + n_out;
        double miter;
        if (norm(bisector) < 1e-12) {
            bisector = d_in;
            miter = 4.0 * b;
        } else {
            bisector = normalized(bisector);
            const double cos_half = dot(bisector, n_in);
            miter = cos_half > 0.25 ? b / cos_half : 4.0 * b;
        }
        out[i] = cur + miter * bisector;
    }
    return out;
}

/// Some pair (i, j), i < j, of non-adjacent ring edges that meet.
inline std::optional<std::pair<std::size_t, std::size_t>> first_crossing(std::span<const Point2> ring)
{
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = ring[i], b = ring[(i + 1) % m];
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1)
                continue;
            const Point2 c = ring[j], d = ring[(j + 1) % m];
            if (std::max(c.x, d.x) < std::min(a.x, b.x) || std::min(c.x, d.x) > std::max(a.x, b.x)
                || std::max(c.y, d.y) < std::min(a.y, b.y) || std::min(c.y, d.y) > std::max(a.y, b.y))
                continue;
            if (segments_intersect(a, b, c, d))
                return std::pair{i, j};
        }
    }
    return std::nullopt;
}

} // namespace detail

inline Outline offset_outline(const Outline& outline, double b)
{
    if (!(b > 0.0) || !std::isfinite(b))
        throw Error(ErrorCode::InvalidConfig, "offset must be a positive finite number");
    const auto ring = outline.vertices();
    std::vector<Point2> out = detail::miter_offset(ring, b);
    if (!is_simple(out) || signed_area(out) <= signed_area(ring))
        throw Error(ErrorCode::OffsetSelfIntersection, "offset of " + std::to_string(b) + " folds the outline");
    const double eps = 1e-12 * bounding_box(out).diagonal();
    for (const auto& p : ring)
        if (point_in_polygon(p, out, eps) != Location::Inside)
            throw Error(ErrorCode::OffsetSelfIntersection, "offset outline does not contain the input");
    return Outline::trusted(std::move(out));
}

/// Removes one reflex vertex whose removal keeps the ring simple, choosing the
/// shallowest notch. The polygon only grows, so containment is preserved.
/// Returns false when the ring has no removable reflex vertex.
inline bool fill_shallowest_notch(std::vector<Point2>& ring)
{
    const std::size_t m = ring.size();
    if (m <= 3)
        return false;
    std::vector<std::pair<double, std::size_t>> reflex;
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 prev = ring[(i + m - 1) % m];
        const Point2 next = ring[(i + 1) % m];
        if (cross(ring[i] - prev, next - ring[i]) < 0.0)
            reflex.emplace_back(distance_to_segment(ring[i], prev, next), i);
    }
    std::sort(reflex.begin(), reflex.end());
    for (const auto& [depth, i] : reflex) {
        std::vector<Point2> trial;
        trial.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j)
            if (j != i)
                trial.push_back(ring[j]);
        if (is_simple(trial)) {
            ring = std::move(trial);
            return true;
        }
    }
    return false;
}

namespace detail {

/// True when the edge joining the neighbours of vertex i meets no ring edge
/// other than the ones sharing its endpoints, so dropping i keeps the ring simple.
inline bool bridge_is_clear(std::span<const Point2> ring, std::size_t i)
{
    const std::size_t m = ring.size();
    const std::size_t ip = (i + m - 1) % m, in = (i + 1) % m;
    const Point2 a = ring[ip], b = ring[in];
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t f = (e + 1) % m;
        if (e == ip || e == i || f == ip || e == in)
            continue;
        if (segments_intersect(a, b, ring[e], ring[f]))
            return false;
    }
    return true;
}

inline bool is_reflex(std::span<const Point2> ring, std::size_t i)
{
    const std::size_t m = ring.size();
    const Point2 prev = ring[(i + m - 1) % m];
    const Point2 next = ring[(i + 1) % m];
    return cross(ring[i] - prev, next - ring[i]) < 0.0;
}

} // namespace detail

/// Repeatedly removes the shallowest reflex vertex whose notch depth (distance
/// to the chord joining its neighbours) is below `depth`, as long as the ring
/// stays simple. The ring only grows, so anything it contained stays inside.
/// Returns the number of vertices removed.
inline std::size_t fill_notches_shallower_than(std::vector<Point2>& ring, double depth)
{
    std::size_t removed = 0;
    std::vector<char> blocked;
    while (ring.size() > 3) {
        const std::size_t m = ring.size();
        blocked.resize(m, 0);
        double best = depth;
        std::size_t pick = m;
        for (std::size_t i = 0; i < m; ++i) {
            const Point2 prev = ring[(i + m - 1) % m];
            const Point2 next = ring[(i + 1) % m];
            if (blocked[i] || cross(ring[i] - prev, next - ring[i]) >= 0.0)
                continue;
            const double d = distance_to_segment(ring[i], prev, next);
            if (d < best) {
                best = d;
                pick = i;
            }
        }
        if (pick == m)
            break;
        const bool clear = detail::bridge_is_clear(ring, pick);
        if (!clear) {
            blocked[pick] = 1;
            continue;
        }
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(pick));
        blocked.assign(ring.size(), 0);
        ++removed;
    }
    return removed;
}

/// Where the offset of `ring` by b folds over itself, replaces the vertex
/// chain between the two crossing edges with a straight bridge, closing an
/// inlet narrower than about 2b. Only bridges that keep the ring simple and
/// grow its area are taken. Returns false when no such bridge exists.
inline bool bridge_offset_fold(std::vector<Point2>& ring, double b)
{
    const std::size_t m = ring.size();
    if (m <= 3)
        return false;
    const auto crossing = detail::first_crossing(detail::miter_offset(ring, b));
    if (!crossing)
        return false;
    const auto [i, j] = *crossing;
    const double area = signed_area(ring);
    auto try_keep = [&](std::size_t from, std::size_t to) {
        // Keep vertices from..to walking forward (inclusive), dropping the rest.
        std::vector<Point2> trial;
        for (std::size_t k = from;; k = (k + 1) % m) {
            trial.push_back(ring[k]);
            if (k == to)
                break;
        }
        if (trial.size() < 3 || trial.size() == m || !is_simple(trial) || signed_area(trial) <= area)
            return false;
        // More area is not enough: the dropped chain must lie inside the
        // new ring, or the bridge would cut a lobe off the old one.
        const Point2 a = ring[to], c = ring[from];
        const double eps = 1e-12 * bounding_box(ring).diagonal();
        auto crosses = [&](Point2 p, Point2 q) {
            const double d1 = cross(c - a, p - a), d2 = cross(c - a, q - a);
            const double d3 = cross(q - p, a - p), d4 = cross(q - p, c - p);
            return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
        };
        for (std::size_t k = (to + 1) % m; k != from; k = (k + 1) % m) {
            if (point_in_polygon(ring[k], trial, eps) == Location::Outside)
                return false;
            if (crosses(ring[(k + m - 1) % m], ring[k]))
                return false;
        }
        ring = std::move(trial);
        return true;
    };
    // Drop i+1..j (bridge i -> j+1), or drop j+1..i (bridge j -> i+1).
    const std::size_t inner = j - i;
    const std::size_t outer = m - inner;
    if (inner <= outer)
        return try_keep((j + 1) % m, i) || try_keep((i + 1) % m, j);
    return try_keep((i + 1) % m, j) || try_keep((j + 1) % m, i);
}

} // namespace phoenixmap

#endif
