#ifndef PHOENIXMAP_CURVE_HPP
#define PHOENIXMAP_CURVE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "phoenixmap/error.hpp"
#include "phoenixmap/geometry.hpp"

namespace phoenixmap {

struct CubicBezier {
    std::array<Point2, 4> ctrl;

    Point2 eval(double t) const noexcept
    {
        const double s = 1.0 - t;
        return (s * s * s) * ctrl[0] + (3.0 * s * s * t) * ctrl[1] + (3.0 * s * t * t) * ctrl[2]
            + (t * t * t) * ctrl[3];
    }
    Point2 derivative(double t) const noexcept
    {
        const double s = 1.0 - t;
        return (3.0 * s * s) * (ctrl[1] - ctrl[0]) + (6.0 * s * t) * (ctrl[2] - ctrl[1])
            + (3.0 * t * t) * (ctrl[3] - ctrl[2]);
    }
    Point2 second_derivative(double t) const noexcept
    {
        return (6.0 * (1.0 - t)) * (ctrl[2] - 2.0 * ctrl[1] + ctrl[0]) + (6.0 * t) * (ctrl[3] - 2.0 * ctrl[2] + ctrl[1]);
    }
    /// Largest distance of the inner control points from the chord.
    double flatness() const noexcept
    {
        return std::max(distance_to_segment(ctrl[1], ctrl[0], ctrl[3]), distance_to_segment(ctrl[2], ctrl[0], ctrl[3]));
    }
    std::pair<CubicBezier, CubicBezier> split(double t) const noexcept
    {
        const Point2 a = lerp(ctrl[0], ctrl[1], t), b = lerp(ctrl[1], ctrl[2], t), c = lerp(ctrl[2], ctrl[3], t);
        const Point2 ab = lerp(a, b, t), bc = lerp(b, c, t);
        const Point2 m = lerp(ab, bc, t);
        return {CubicBezier{{ctrl[0], a, ab, m}}, CubicBezier{{m, bc, c, ctrl[3]}}};
    }
};

/// Position on a closed curve: piece index plus local Bezier parameter.
struct CurveLocation {
    std::size_t piece = 0;
    double t = 0.0;
};

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> gl_nodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 8> gl_weights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

inline double bezier_length(const CubicBezier& b, double t0, double t1) noexcept
{
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t1 + t0);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl_nodes.size(); ++i)
        sum += gl_weights[i] * norm(b.derivative(mid + half * gl_nodes[i]));
    return sum * half;
}

/// Solves a cyclic tridiagonal system (row i: sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1],
/// indices modulo m) via Sherman-Morrison. Requires m >= 3 and a diagonally dominant matrix.
inline std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub, std::span<const double> diag,
    std::span<const double> sup, std::span<const double> rhs)
{
    const std::size_t m = diag.size();
    const double alpha = sup[m - 1]; // lower-left corner
    const double beta = sub[0]; // upper-right corner
    const double gamma = -diag[0];

    std::vector<double> bb(diag.begin(), diag.end());
    bb[0] = diag[0] - gamma;
    bb[m - 1] = diag[m - 1] - alpha * beta / gamma;

    auto thomas = [&](std::span<const double> r) {
        std::vector<double> c(m), d(m), x(m);
        c[0] = sup[0] / bb[0];
        d[0] = r[0] / bb[0];
        for (std::size_t i = 1; i < m; ++i) {
            const double denom = bb[i] - sub[i] * c[i - 1];
            c[i] = i + 1 < m ? sup[i] / denom : 0.0;
            d[i] = (r[i] - sub[i] * d[i - 1]) / denom;
        }
        x[m - 1] = d[m - 1];
        for (std::size_t i = m - 1; i-- > 0;)
            x[i] = d[i] - c[i] * x[i + 1];
        return x;
    };

    auto x = thomas(rhs);
    std::vector<double> u(m, 0.0);
    u[0] = gamma;
    u[m - 1] = alpha;
    const auto z = thomas(u);
    const double fact = (x[0] + beta * x[m - 1] / gamma) / (1.0 + z[0] + beta * z[m - 1] / gamma);
    for (std::size_t i = 0; i < m; ++i)
        x[i] -= fact * z[i];
    return x;
}

} // namespace detail

/// Closed composite cubic Bezier curve. Piece j spans a chord-length parameter
/// interval of width spans()[j]; the curve is C2 in that global parameter.
class ClosedCurve {
public:
    /// Empty curve; only useful as a placeholder to assign into.
    ClosedCurve() = default;

    ClosedCurve(std::vector<CubicBezier> pieces, std::vector<double> spans)
        : pieces_(std::move(pieces))
        , spans_(std::move(spans))
    {
        build_arc_table();
    }

    std::span<const CubicBezier> pieces() const noexcept { return pieces_; }
    std::span<const double> spans() const noexcept { return spans_; }
    std::size_t size() const noexcept { return pieces_.size(); }
    /// Total arc length.
    double period() const noexcept { return length_; }
    BoundingBox control_bbox() const noexcept
    {
        BoundingBox box;
        for (const auto& p : pieces_)
            for (const auto& c : p.ctrl)
                box.expand(c);
        return box;
    }

    Point2 eval(CurveLocation loc) const noexcept { return pieces_[loc.piece].eval(loc.t); }
    Point2 tangent(CurveLocation loc) const noexcept { return normalized(pieces_[loc.piece].derivative(loc.t)); }

    /// Signed curvature; positive when the curve turns left.
    double curvature(CurveLocation loc) const noexcept
    {
        const Point2 d1 = pieces_[loc.piece].derivative(loc.t);
        const Point2 d2 = pieces_[loc.piece].second_derivative(loc.t);
        const double speed = norm(d1);
        return speed > 0.0 ? cross(d1, d2) / (speed * speed * speed) : 0.0;
    }

    /// Global parameter u in [0, size()) to a location.
    CurveLocation at_parameter(double u) const noexcept
    {
        const double m = static_cast<double>(pieces_.size());
        u = std::fmod(u, m);
        if (u < 0.0)
            u += m;
        auto piece = static_cast<std::size_t>(u);
        if (piece >= pieces_.size())
            piece = pieces_.size() - 1;
        return {piece, std::clamp(u - static_cast<double>(piece), 0.0, 1.0)};
    }

    /// Location at arc length s from the curve start (s taken modulo the period).
    CurveLocation at_arc_length(double s) const noexcept
    {
        s = std::fmod(s, length_);
        if (s < 0.0)
            s += length_;
        auto it = std::upper_bound(cells_.begin(), cells_.end(), s, [](double v, const Cell& c) { return v < c.s0; });
        const Cell& cell = *std::prev(it == cells_.begin() ? std::next(it) : it);
        const CubicBezier& b = pieces_[cell.piece];
        const double target = s - cell.s0;
        double lo = cell.t0, hi = cell.t1;
        double t = cell.t0 + (cell.t1 - cell.t0) * std::clamp(target / cell.length, 0.0, 1.0);
        for (int iter = 0; iter < 50; ++iter) {
            const double f = detail::bezier_length(b, cell.t0, t) - target;
            if (std::abs(f) <= 1e-14 * length_)
                break;
            if (f > 0.0)
                hi = t;
            else
                lo = t;
            const double speed = norm(b.derivative(t));
            double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            t = next;
        }
        return {cell.piece, t};
    }

    /// Arc length from the curve start to `loc`.
    double arc_length_at(CurveLocation loc) const noexcept
    {
        auto it = std::upper_bound(cells_.begin(), cells_.end(), loc, [](CurveLocation l, const Cell& c) {
            return l.piece < c.piece || (l.piece == c.piece && l.t < c.t0);
        });
        const Cell& cell = *std::prev(it == cells_.begin() ? std::next(it) : it);
        return cell.s0 + detail::bezier_length(pieces_[cell.piece], cell.t0, loc.t);
    }

    /// Points on the curve such that every chord deviates by at most `tolerance`
    /// and no chord spans more than `max_step` of arc length. The start point is
    /// not repeated at the end. `params` receives global parameters when given.
    std::vector<Point2> flatten(double tolerance, double max_step, std::vector<double>* params = nullptr) const
    {
        std::vector<Point2> out;
        if (params)
            params->clear();
        for (std::size_t j = 0; j < pieces_.size(); ++j)
            flatten_piece(j, pieces_[j], 0.0, 1.0, tolerance, max_step, 0, out, params);
        return out;
    }

private:
    struct Cell {
        std::size_t piece;
        double t0, t1, s0, length;
    };

    void build_arc_table()
    {
        cells_.clear();
        double s = 0.0;
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            constexpr int cells_per_piece = 16;
            for (int c = 0; c < cells_per_piece; ++c) {
                const double t0 = static_cast<double>(c) / cells_per_piece;
                const double t1 = static_cast<double>(c + 1) / cells_per_piece;
                const double len = detail::bezier_length(pieces_[j], t0, t1);
                cells_.push_back({j, t0, t1, s, len});
                s += len;
            }
        }
        length_ = s;
    }

    void flatten_piece(std::size_t j, const CubicBezier& b, double t0, double t1, double tol, double max_step,
        int depth, std::vector<Point2>& out, std::vector<double>* params) const
    {
        const bool flat = b.flatness() <= tol && distance(b.ctrl[0], b.ctrl[3]) <= max_step;
        if (flat || depth >= 24) {
            out.push_back(b.ctrl[0]);
            if (params)
                params->push_back(static_cast<double>(j) + t0);
            return;
        }
        const auto [left, right] = b.split(0.5);
        const double tm = 0.5 * (t0 + t1);
        flatten_piece(j, left, t0, tm, tol, max_step, depth + 1, out, params);
        flatten_piece(j, right, tm, t1, tol, max_step, depth + 1, out, params);
    }

    std::vector<CubicBezier> pieces_;
    std::vector<double> spans_;
    std::vector<Cell> cells_;
    double length_ = 0.0;
};

/// Closed C2 interpolating cubic spline through the outline vertices in order,
/// chord-length parameterised, as Bezier pieces (one per outline edge).
inline ClosedCurve fit_closed_bezier(std::span<const Point2> vertices)
{
    std::vector<Point2> pts;
    pts.reserve(vertices.size());
    for (const auto& p : vertices)
        if (pts.empty() || !(pts.back() == p))
            pts.push_back(p);
    while (pts.size() > 1 && pts.front() == pts.back())
        pts.pop_back();
    if (pts.size() < 3)
        throw Error(ErrorCode::DegenerateOutline, "closed curve needs at least 3 distinct vertices");

    const std::size_t m = pts.size();
    std::vector<double> h(m);
    for (std::size_t i = 0; i < m; ++i)
        h[i] = distance(pts[i], pts[(i + 1) % m]);

    std::vector<double> sub(m), diag(m), sup(m), rx(m), ry(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t prev = (i + m - 1) % m;
        const std::size_t next = (i + 1) % m;
        sub[i] = h[prev];
        diag[i] = 2.0 * (h[prev] + h[i]);
        sup[i] = h[i];
        const Point2 slope = (pts[next] - pts[i]) / h[i] - (pts[i] - pts[prev]) / h[prev];
        rx[i] = 6.0 * slope.x;
        ry[i] = 6.0 * slope.y;
    }
    const auto mx = detail::solve_cyclic_tridiagonal(sub, diag, sup, rx);
    const auto my = detail::solve_cyclic_tridiagonal(sub, diag, sup, ry);

    std::vector<CubicBezier> pieces(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t next = (i + 1) % m;
        const Point2 mi{mx[i], my[i]};
        const Point2 mn{mx[next], my[next]};
        const Point2 chord = (pts[next] - pts[i]) / h[i];
        const Point2 d_start = chord - (h[i] / 6.0) * (2.0 * mi + mn);
        const Point2 d_end = chord + (h[i] / 6.0) * (mi + 2.0 * mn);
        pieces[i].ctrl = {pts[i], pts[i] + (h[i] / 3.0) * d_start, pts[next] - (h[i] / 3.0) * d_end, pts[next]};
    }
    return ClosedCurve(std::move(pieces), std::move(h));
}

inline ClosedCurve fit_closed_bezier(const Outline& outline) { return fit_closed_bezier(outline.vertices()); }

/// Inserts vertices along long edges so no edge exceeds `max_edge`.
inline std::vector<Point2> densify(std::span<const Point2> ring, double max_edge)
{
    std::vector<Point2> out;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point2 a = ring[i];
        const Point2 b = ring[(i + 1) % ring.size()];
        const auto pieces = static_cast<std::size_t>(std::ceil(distance(a, b) / max_edge));
        out.push_back(a);
        for (std::size_t k = 1; k < pieces; ++k)
            out.push_back(lerp(a, b, static_cast<double>(k) / static_cast<double>(pieces)));
    }
    return out;
}

/// Flattened closed curve with a uniform grid over its chords, used for
/// containment, area, nearest-sample and self-intersection queries.
class CurveIndex {
public:
    /// Flattening tolerance and the boundary tolerance scale with the
    /// bounding-box diagonal of the curve's control polygon.
    explicit CurveIndex(const ClosedCurve& curve, double relative_tolerance = 1e-6)
        : period_(curve.period())
    {
        const double diag = curve.control_bbox().diagonal();
        samples_ = curve.flatten(relative_tolerance * diag, curve.period() / 4096.0, &params_);
        box_ = bounding_box(samples_);
        diag_ = box_.diagonal();
        boundary_eps_ = 1e-12 * diag_;
        area_ = phoenixmap::signed_area(samples_);
        build_grid();
    }

    std::span<const Point2> samples() const noexcept { return samples_; }
    std::span<const double> sample_params() const noexcept { return params_; }
    const BoundingBox& bbox() const noexcept { return box_; }
    double diagonal() const noexcept { return diag_; }
    /// Signed area of the flattened curve; positive for counter-clockwise traversal.
    double signed_area() const noexcept { return area_; }
    double area() const noexcept { return std::abs(area_); }
    bool counter_clockwise() const noexcept { return area_ > 0.0; }

    Location locate(Point2 p) const noexcept
    {
        if (p.x < box_.min.x - boundary_eps_ || p.x > box_.max.x + boundary_eps_ || p.y < box_.min.y - boundary_eps_
            || p.y > box_.max.y + boundary_eps_)
            return Location::Outside;
        const std::size_t row = row_of(p.y);
        bool inside = false;
        const std::size_t m = samples_.size();
        for (std::size_t seg : rows_[row]) {
            const Point2 a = samples_[seg];
            const Point2 b = samples_[(seg + 1) % m];
            if (distance_to_segment(p, a, b) <= boundary_eps_)
                return Location::Boundary;
            if ((a.y > p.y) != (b.y > p.y)) {
                const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < xc)
                    inside = !inside;
            }
        }
        return inside ? Location::Inside : Location::Outside;
    }

    /// Inside or on the boundary.
    bool contains(Point2 p) const noexcept { return locate(p) != Location::Outside; }

    /// Calls f(sample_index) for every sample in the grid cells at Chebyshev
    /// ring distance `ring` around p. Returns false once the ring lies entirely
    /// outside the grid.
    template <class F>
    bool visit_ring(Point2 p, std::size_t ring, F&& f) const
    {
        const auto cx = static_cast<std::ptrdiff_t>(col_of(p.x));
        const auto cy = static_cast<std::ptrdiff_t>(row_of(p.y));
        const auto r = static_cast<std::ptrdiff_t>(ring);
        const auto nx = static_cast<std::ptrdiff_t>(nx_), ny = static_cast<std::ptrdiff_t>(ny_);
        if (cx - r < 0 && cy - r < 0 && cx + r >= nx && cy + r >= ny && ring > 0) {
            // Whole grid already covered by smaller rings.
            return false;
        }
        for (std::ptrdiff_t y = cy - r; y <= cy + r; ++y) {
            if (y < 0 || y >= ny)
                continue;
            const bool full_row = (y == cy - r || y == cy + r);
            const std::ptrdiff_t step = (full_row || r == 0) ? 1 : 2 * r;
            for (std::ptrdiff_t x = cx - r; x <= cx + r; x += step) {
                if (x >= 0 && x < nx)
                    for (std::size_t s : point_cells_[static_cast<std::size_t>(y) * nx_ + static_cast<std::size_t>(x)])
                        f(s);
            }
        }
        return true;
    }

    double cell_size() const noexcept { return cell_; }
    /// Longest chord between consecutive samples.
    double max_chord() const noexcept { return max_chord_; }

    /// Distance from p to the flattened curve.
    double distance_to(Point2 p) const
    {
        double best = std::numeric_limits<double>::infinity();
        const std::size_t m = samples_.size();
        for (std::size_t ring = 0;; ++ring) {
            const double reach = ring == 0 ? 0.0 : static_cast<double>(ring - 1) * cell_ - max_chord_;
            if (best <= reach)
                break;
            const bool any = visit_ring(p, ring, [&](std::size_t s) {
                best = std::min(best, distance_to_segment(p, samples_[s], samples_[(s + 1) % m]));
                best = std::min(best, distance_to_segment(p, samples_[(s + m - 1) % m], samples_[s]));
            });
            if (!any)
                break;
        }
        return best;
    }

    /// True when no two non-adjacent chords of the flattened curve meet.
    bool is_simple() const
    {
        const std::size_t m = samples_.size();
        for (const auto& cell : segment_cells_) {
            for (std::size_t a = 0; a < cell.size(); ++a) {
                for (std::size_t b = a + 1; b < cell.size(); ++b) {
                    const std::size_t i = cell[a], j = cell[b];
                    const std::size_t diff = i > j ? i - j : j - i;
                    if (diff <= 1 || diff == m - 1)
                        continue;
                    if (segments_intersect(samples_[i], samples_[(i + 1) % m], samples_[j], samples_[(j + 1) % m]))
                        return false;
                }
            }
        }
        return true;
    }

private:
    std::size_t col_of(double x) const noexcept
    {
        const double v = (x - box_.min.x) / cell_;
        return v > 0.0 ? std::min(nx_ - 1, static_cast<std::size_t>(v)) : 0;
    }
    std::size_t row_of(double y) const noexcept
    {
        const double v = (y - box_.min.y) / cell_;
        return v > 0.0 ? std::min(ny_ - 1, static_cast<std::size_t>(v)) : 0;
    }

    void build_grid()
    {
        const std::size_t m = samples_.size();
        const double mean_step = period_ / static_cast<double>(m);
        cell_ = std::max({8.0 * mean_step, box_.width() / 512.0, box_.height() / 512.0, 1e-300});
        nx_ = static_cast<std::size_t>(box_.width() / cell_) + 1;
        ny_ = static_cast<std::size_t>(box_.height() / cell_) + 1;
        point_cells_.assign(nx_ * ny_, {});
        segment_cells_.assign(nx_ * ny_, {});
        rows_.assign(ny_, {});
        const double margin = 1e-9 * diag_;
        for (std::size_t i = 0; i < m; ++i) {
            const Point2 a = samples_[i];
            const Point2 b = samples_[(i + 1) % m];
            max_chord_ = std::max(max_chord_, distance(a, b));
            point_cells_[row_of(a.y) * nx_ + col_of(a.x)].push_back(i);
            const std::size_t r0 = row_of(std::min(a.y, b.y) - margin), r1 = row_of(std::max(a.y, b.y) + margin);
            const std::size_t c0 = col_of(std::min(a.x, b.x) - margin), c1 = col_of(std::max(a.x, b.x) + margin);
            for (std::size_t r = r0; r <= r1; ++r) {
                rows_[r].push_back(i);
                for (std::size_t c = c0; c <= c1; ++c)
                    segment_cells_[r * nx_ + c].push_back(i);
            }
        }
    }

    double period_ = 0.0;
    double max_chord_ = 0.0;
    std::vector<Point2> samples_;
    std::vector<double> params_;
    BoundingBox box_;
    double diag_ = 0.0;
    double boundary_eps_ = 0.0;
    double area_ = 0.0;
    double cell_ = 1.0;
    std::size_t nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> point_cells_;
    std::vector<std::vector<std::size_t>> segment_cells_;
    std::vector<std::vector<std::size_t>> rows_;
};

/// The curve cut into n arcs of equal length. Divisor i starts arc i; arc
/// n-1 ends back at divisor 0.
struct SegmentedCurve {
    std::vector<Point2> divisors;
    std::vector<Point2> inward_normals;
    std::vector<double> arc_lengths;
    std::vector<CurveLocation> locations;
    /// Curvature toward the inward normal (positive where the curve bends inward).
    std::vector<double> inward_curvature;
    double length = 0.0;

    std::size_t size() const noexcept { return divisors.size(); }
    std::size_t next(std::size_t i) const noexcept { return (i + 1) % divisors.size(); }
};

inline SegmentedCurve segment_curve(const ClosedCurve& curve, const CurveIndex& index, std::size_t n)
{
    if (n < 16)
        throw Error(ErrorCode::BadSegmentCount, "segment count must be at least 16, got " + std::to_string(n));
    const double orientation = index.counter_clockwise() ? 1.0 : -1.0;
    SegmentedCurve out;
    out.length = curve.period();
    out.divisors.resize(n);
    out.inward_normals.resize(n);
    out.arc_lengths.resize(n);
    out.locations.resize(n);
    out.inward_curvature.resize(n);
    const double step = curve.period() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CurveLocation loc = i == 0 ? CurveLocation{0, 0.0} : curve.at_arc_length(step * static_cast<double>(i));
        out.locations[i] = loc;
        out.divisors[i] = curve.eval(loc);
        out.inward_normals[i] = orientation * perp(curve.tangent(loc));
        out.inward_curvature[i] = orientation * curve.curvature(loc);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double s0 = curve.arc_length_at(out.locations[i]);
        const double s1 = i + 1 < n ? curve.arc_length_at(out.locations[i + 1]) : curve.period();
        out.arc_lengths[i] = s1 - s0;
    }
    return out;
}

inline SegmentedCurve segment_curve(const ClosedCurve& curve, std::size_t n)
{
    const CurveIndex index(curve);
    return segment_curve(curve, index, n);
}

} // namespace phoenixmap

#endif
