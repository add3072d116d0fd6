#include <gtest/gtest.h>

#include <numbers>

#include "phoenixmap/curve.hpp"
#include "phoenixmap/geometry.hpp"
#include "support.hpp"

using namespace phoenixmap;

namespace {

// Arc length of one Bezier piece between t0 and t1 from a fine chord sum.
double chord_length(const CubicBezier& b, double t0, double t1, int steps = 4000)
{
    double s = 0;
    Point2 prev = b.eval(t0);
    for (int k = 1; k <= steps; ++k) {
        const Point2 p = b.eval(t0 + (t1 - t0) * k / steps);
        s += std::hypot(p.x - prev.x, p.y - prev.y);
        prev = p;
    }
    return s;
}

double chord_arc_between(const ClosedCurve& c, CurveLocation a, CurveLocation b)
{
    const auto pieces = c.pieces();
    if (a.piece == b.piece && a.t <= b.t)
        return chord_length(pieces[a.piece], a.t, b.t, 400);
    double s = chord_length(pieces[a.piece], a.t, 1.0, 400);
    for (std::size_t j = (a.piece + 1) % c.size(); j != b.piece; j = (j + 1) % c.size())
        s += chord_length(pieces[j], 0.0, 1.0, 400);
    return s + chord_length(pieces[b.piece], 0.0, b.t, 400);
}

std::vector<Point2> hexagon()
{
    std::vector<Point2> v;
    for (int i = 0; i < 6; ++i)
        v.push_back({std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3)});
    return v;
}

double diag_of(const std::vector<Point2>& v)
{
    const auto box = bounding_box(std::span<const Point2>(v));
    return std::hypot(box.width(), box.height());
}

double max_vertex_gap(const ClosedCurve& c, const std::vector<Point2>& verts)
{
    // Every vertex must be some piece's start point.
    double worst = 0;
    for (const auto& v : verts) {
        double best = INFINITY;
        for (const auto& p : c.pieces())
            best = std::min(best, distance(p.eval(0.0), v));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST(Fit, HexagonStaysNearCircumcircle)
{
    const auto curve = fit_closed_bezier(std::span<const Point2>(hexagon()));
    double worst = 0;
    for (const auto& p : curve.pieces())
        for (int k = 0; k < 167; ++k) {
            const Point2 q = p.eval(k / 167.0);
            worst = std::max(worst, std::abs(std::hypot(q.x, q.y) - 1.0));
        }
    EXPECT_LT(worst, 0.02);
}

TEST(Fit, TriangleIsInterpolated)
{
    const std::vector<Point2> tri{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
    const auto curve = fit_closed_bezier(std::span<const Point2>(tri));
    EXPECT_LE(max_vertex_gap(curve, tri), 1e-9 * diag_of(tri));
}

TEST(Fit, SquareIsCurvatureContinuousAtJoins)
{
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto curve = fit_closed_bezier(std::span<const Point2>(sq));
    const auto pieces = curve.pieces();
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        const std::size_t k = (j + 1) % pieces.size();
        // Finite-difference curvature just before and after the join.
        const double h = 1e-5;
        auto kappa = [](const CubicBezier& b, double t, double h) {
            const Point2 a = b.eval(t - h), m = b.eval(t), c = b.eval(t + h);
            const Point2 d1 = (c - a) / (2 * h), d2 = (c - 2.0 * m + a) / (h * h);
            return cross(d1, d2) / std::pow(norm(d1), 3);
        };
        const double left = kappa(pieces[j], 1.0 - h, h);
        const double right = kappa(pieces[k], h, h);
        EXPECT_NEAR(left, right, 1e-3 * std::max(1.0, std::abs(left)));
        // Exact C0 and tangent continuity.
        EXPECT_EQ(pieces[j].ctrl[3], pieces[k].ctrl[0]);
        const Point2 tl = normalized(pieces[j].derivative(1.0)), tr = normalized(pieces[k].derivative(0.0));
        EXPECT_NEAR(tl.x, tr.x, 1e-9);
        EXPECT_NEAR(tl.y, tr.y, 1e-9);
    }
}

TEST(Fit, InterpolatesHullVertices)
{
    for (unsigned seed = 1; seed <= 8; ++seed) {
        const auto pts = oracle::uniform_disc(500, seed, {3, -2}, 40.0);
        const auto hull = concave_hull(std::span<const Point2>(pts), 5);
        const std::vector<Point2> verts(hull.vertices().begin(), hull.vertices().end());
        const auto curve = fit_closed_bezier(hull);
        EXPECT_LE(max_vertex_gap(curve, verts), 1e-9 * diag_of(verts));
    }
}

TEST(Fit, DegenerateOutlineRejected)
{
    const std::vector<Point2> two{{0, 0}, {1, 0}, {0, 0}};
    try {
        fit_closed_bezier(std::span<const Point2>(two));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateOutline);
    }
}

TEST(Fit, ClosureIsExact)
{
    const auto curve = fit_closed_bezier(std::span<const Point2>(hexagon()));
    const auto p = curve.pieces();
    EXPECT_EQ(p.back().ctrl[3], p.front().ctrl[0]);
}

TEST(Segment, CircleLikeCurveEqualSpacing)
{
    const auto ring = oracle::circle_ring({0, 0}, 5.0, 64);
    const auto curve = fit_closed_bezier(std::span<const Point2>(ring));
    const auto seg = segment_curve(curve, 100);
    ASSERT_EQ(seg.size(), 100u);
    const double L = 2 * std::numbers::pi * 5.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const double s = chord_arc_between(curve, seg.locations[i], seg.locations[seg.next(i)]);
        EXPECT_NEAR(s / (L / 100.0), 1.0, 0.005);
    }
}

TEST(Segment, ThreeThousandDivisorsClosingOnStart)
{
    const auto pts = oracle::uniform_disc(800, 7, {0, 0}, 10.0);
    const auto curve = fit_closed_bezier(concave_hull(std::span<const Point2>(pts), 5));
    const auto seg = segment_curve(curve, 3000);
    EXPECT_EQ(seg.size(), 3000u);
    EXPECT_EQ(seg.next(2999), 0u);
    EXPECT_EQ(seg.divisors[0], curve.pieces()[0].ctrl[0]);
    double total = 0;
    for (double s : seg.arc_lengths)
        total += s;
    EXPECT_NEAR(total, seg.length, 1e-9 * seg.length);
}

TEST(Segment, EqualArcCvOnHullCurves)
{
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const auto pts = oracle::c_shape(400, seed);
        const auto hull = concave_hull(std::span<const Point2>(pts), 6);
        const auto curve = fit_closed_bezier(hull);
        const auto seg = segment_curve(curve, 300);
        std::vector<double> lens;
        for (std::size_t i = 0; i < seg.size(); ++i)
            lens.push_back(chord_arc_between(curve, seg.locations[i], seg.locations[seg.next(i)]));
        double mean = 0, var = 0;
        for (double s : lens)
            mean += s;
        mean /= static_cast<double>(lens.size());
        for (double s : lens)
            var += (s - mean) * (s - mean);
        EXPECT_LT(std::sqrt(var / static_cast<double>(lens.size())) / mean, 0.005) << "seed " << seed;
    }
}

TEST(Segment, NormalsPointInward)
{
    const std::vector<Point2> squarish{{0, 0}, {2, 0.1}, {2.1, 2}, {0.1, 2.1}};
    const auto curve = fit_closed_bezier(std::span<const Point2>(squarish));
    const auto seg = segment_curve(curve, 400);
    std::vector<Point2> flat;
    for (const auto& p : curve.pieces())
        for (int k = 0; k < 500; ++k)
            flat.push_back(p.eval(k / 500.0));
    const double delta = 1e-3 * diag_of(flat);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const Point2 probe = seg.divisors[i] + delta * seg.inward_normals[i];
        EXPECT_NE(oracle::winding_number(probe, flat), 0) << i;
        EXPECT_NEAR(norm(seg.inward_normals[i]), 1.0, 1e-12);
    }
}

TEST(Segment, ClockwiseInputStillGetsInwardNormals)
{
    auto ring = oracle::circle_ring({1, 1}, 2.0, 24);
    std::reverse(ring.begin(), ring.end());
    const auto curve = fit_closed_bezier(std::span<const Point2>(ring));
    const auto seg = segment_curve(curve, 64);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const Point2 to_center = Point2{1, 1} - seg.divisors[i];
        EXPECT_GT(dot(to_center, seg.inward_normals[i]), 0.0);
    }
}

TEST(Segment, TooFewSegmentsRejected)
{
    const auto curve = fit_closed_bezier(std::span<const Point2>(hexagon()));
    try {
        segment_curve(curve, 15);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadSegmentCount);
    }
}

TEST(CurveIndexTest, AreaAndContainmentAgreeWithOracles)
{
    const auto ring = oracle::circle_ring({0, 0}, 3.0, 48);
    const auto curve = fit_closed_bezier(std::span<const Point2>(ring));
    const CurveIndex index(curve);
    EXPECT_NEAR(index.area() / (std::numbers::pi * 9.0), 1.0, 1e-3);
    EXPECT_TRUE(index.counter_clockwise());
    EXPECT_TRUE(index.is_simple());
    EXPECT_TRUE(index.contains({0, 0}));
    EXPECT_TRUE(index.contains({2.9, 0}));
    EXPECT_FALSE(index.contains({3.1, 0}));
}

TEST(CurveIndexTest, DetectsSelfIntersection)
{
    // A figure-eight control polygon produces a crossing curve.
    const std::vector<Point2> eight{{0, 0}, {1, 1}, {2, 0}, {3, 1}, {3, -1}, {2, 0.2}, {1, -1}};
    const auto curve = fit_closed_bezier(std::span<const Point2>(eight));
    std::vector<Point2> flat;
    for (const auto& p : curve.pieces())
        for (int k = 0; k < 100; ++k)
            flat.push_back(p.eval(k / 100.0));
    EXPECT_EQ(CurveIndex(curve).is_simple(), oracle::ring_is_simple(flat));
}

TEST(Densify, SplitsLongEdgesOnly)
{
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto d = densify(std::span<const Point2>(sq), 0.3);
    EXPECT_EQ(d.size(), 16u);
    for (std::size_t i = 0; i < d.size(); ++i)
        EXPECT_LE(distance(d[i], d[(i + 1) % d.size()]), 0.3 + 1e-12);
    EXPECT_NEAR(oracle::shoelace(d), 1.0, 1e-12);
}
