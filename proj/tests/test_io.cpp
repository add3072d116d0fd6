#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phoenixmap/io.hpp"

using namespace phoenixmap;

namespace {

SeriesTable csv(const std::string& text)
{
    std::istringstream in(text);
    return parse_points_csv(in);
}

template <class F>
void expect_located(F&& f, ErrorCode code, std::size_t location)
{
    try {
        f();
        FAIL() << "no error";
    } catch (const LocatedError& e) {
        EXPECT_EQ(e.code(), code);
        EXPECT_EQ(e.location(), location);
    }
}

std::filesystem::path temp_file(const std::string& name, const std::string& body)
{
    const auto dir = std::filesystem::temp_directory_path() / "phoenixmap_io_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << body;
    return p;
}

} // namespace

TEST(Csv, TwoRows)
{
    const auto t = csv("x,y\n0,0\n1,1");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.rows[1].x, 1.0);
    EXPECT_FALSE(t.rows[0].series);
}

TEST(Csv, SeriesAndTimeColumnsInAnyOrder)
{
    const auto t = csv("time,series,y,x\n2001,hawk,2.5,-1\n2002,owl,3,4e2\n");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.rows[0].x, -1.0);
    EXPECT_EQ(t.rows[0].y, 2.5);
    EXPECT_EQ(*t.rows[0].series, "hawk");
    EXPECT_EQ(*t.rows[1].time, "2002");
    EXPECT_EQ(t.rows[1].x, 400.0);
}

TEST(Csv, NanIsReportedWithItsLine)
{
    expect_located([] { csv("x,y\nNaN,0\n"); }, ErrorCode::NonFiniteCoordinate, 2);
    expect_located([] { csv("x,y\n0,0\n1,inf\n"); }, ErrorCode::NonFiniteCoordinate, 3);
}

TEST(Csv, MalformedInput)
{
    expect_located([] { csv("x,y\n0,0\n1\n"); }, ErrorCode::ParseError, 3);
    expect_located([] { csv("x,y\n0,zero\n"); }, ErrorCode::ParseError, 2);
    expect_located([] { csv("a,b\n0,0\n"); }, ErrorCode::ParseError, 1);
    expect_located([] { csv(""); }, ErrorCode::ParseError, 1);
}

TEST(Csv, RowOrderAndWriteRoundTrip)
{
    SeriesTable t;
    t.rows = {{0.1, 1.0 / 3.0, "a", "2001"}, {-2e-300, 7.5, "b", std::nullopt}, {1e10, -0.0, std::nullopt, "2003"}};
    std::ostringstream out;
    write_points_csv(t, out);
    const auto back = csv(out.str());
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(back.rows[i].x, t.rows[i].x);
        EXPECT_EQ(back.rows[i].y, t.rows[i].y);
    }
    EXPECT_EQ(*back.rows[0].series, "a");
}

TEST(GeoJson, PointsWithSeries)
{
    const std::string text = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[0,1]},"properties":{"series":"A"}},
        {"type":"Feature","geometry":{"type":"Point","coordinates":[2,3]},"properties":{"series":"A"}},
        {"type":"Feature","geometry":{"type":"Point","coordinates":[4,5]},"properties":{"series":"A","time":2004}}]})";
    const auto t = parse_points_geojson(text);
    ASSERT_EQ(t.size(), 3u);
    for (const auto& r : t.rows)
        EXPECT_EQ(*r.series, "A");
    EXPECT_EQ(t.rows[2].x, 4.0);
    EXPECT_EQ(*t.rows[2].time, "2004");
}

TEST(GeoJson, ErrorsCarryFeatureIndex)
{
    expect_located([] { parse_points_geojson(R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[0,1]}},
        {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,1],[1,1]]}}]})"); },
        ErrorCode::ParseError, 1);
    expect_located([] { parse_points_geojson(R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[0,"a"]}}]})"); },
        ErrorCode::ParseError, 0);
    EXPECT_THROW(parse_points_geojson("{not json"), Error);
    EXPECT_THROW(parse_points_geojson(R"({"type":"Point","coordinates":[0,0]})"), Error);
}

TEST(Outline, RectangleRing)
{
    const auto o = parse_outline_geojson(
        R"({"type":"Polygon","coordinates":[[[0,0],[4,0],[4,2],[0,2],[0,0]]]})");
    EXPECT_EQ(o.size(), 4u);
    EXPECT_DOUBLE_EQ(polygon_area(o), 8.0);
}

TEST(Outline, BowTieRejected)
{
    try {
        parse_outline_geojson(R"({"type":"Polygon","coordinates":[[[0,0],[1,1],[1,0],[0,1],[0,0]]]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SelfIntersectingOutline);
    }
    std::istringstream two("x,y\n0,0\n1,1\n");
    try {
        parse_outline_csv(two);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewVertices);
    }
}

TEST(Outline, ClockwiseSquareReoriented)
{
    std::istringstream in("x,y\n0,0\n0,1\n1,1\n1,0\n");
    const auto o = parse_outline_csv(in);
    EXPECT_GT(signed_area(o.vertices()), 0.0);
    const auto feature = parse_outline_geojson(R"({"type":"FeatureCollection","features":[{"type":"Feature",
        "geometry":{"type":"Polygon","coordinates":[[[0,0],[0,1],[1,1],[1,0]]]}}]})");
    EXPECT_GT(signed_area(feature.vertices()), 0.0);
}

TEST(Files, LoadByExtension)
{
    const auto c = temp_file("pts.csv", "x,y,series\n1,2,a\n3,4,b\n");
    const auto g = temp_file("pts.geojson",
        R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[1,2]}}]})");
    EXPECT_EQ(load_points(c).size(), 2u);
    EXPECT_EQ(load_points(g).size(), 1u);
    const auto ring = temp_file("ring.csv", "x,y\n0,0\n2,0\n2,2\n0,2\n");
    EXPECT_EQ(load_outline(ring).size(), 4u);
    try {
        load_points("/nonexistent/dir/pts.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Io);
    }
}

TEST(Groups, SortedByLabelsRowOrderKept)
{
    const auto t = csv("x,y,series,time\n0,0,b,2\n1,0,a,1\n2,0,b,1\n3,0,a,1\n4,0,,\n");
    const auto g = t.groups();
    ASSERT_EQ(g.size(), 4u);
    EXPECT_FALSE(g[0].series_label.has_value() && !g[0].series_label->empty());
    EXPECT_EQ(g[1].series_label, "a");
    ASSERT_EQ(g[1].points.size(), 2u);
    EXPECT_EQ(g[1].points[0].x, 1.0);
    EXPECT_EQ(g[1].points[1].x, 3.0);
    EXPECT_EQ(g[2].time_label, "1");
    EXPECT_EQ(g[3].time_label, "2");
}

TEST(ConfigTest, DefaultsAndValidation)
{
    Config c;
    EXPECT_EQ(c.segments, 3000u);
    EXPECT_EQ(c.resolved_window(), 300u);
    EXPECT_EQ(c.hull_k, 3u);
    EXPECT_EQ(c.legend_bins, 100u);
    EXPECT_NO_THROW(c.validate());
    auto expect_code = [](Config bad, ErrorCode code) {
        try {
            bad.validate();
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code);
        }
    };
    Config a = c;
    a.segments = 15;
    expect_code(a, ErrorCode::BadSegmentCount);
    Config b = c;
    b.window = 1501;
    expect_code(b, ErrorCode::BadWindow);
    Config d = c;
    d.window = 0;
    expect_code(d, ErrorCode::BadWindow);
    Config e = c;
    e.scale = 0.0;
    expect_code(e, ErrorCode::NonPositiveScale);
    Config f = c;
    f.offset = -1.0;
    expect_code(f, ErrorCode::InvalidConfig);
}

TEST(ConfigTest, JsonRoundTrip)
{
    Config c;
    c.segments = 1000;
    c.window = 70;
    c.scale = 2.5;
    c.offset = 0.3;
    c.hull_mode = HullMode::Convex;
    c.palette = "set1";
    c.series_colors["owl"] = "#123456";
    c.heat_bandwidth = 1.5;
    c.extent = BoundingBox{{-1, -2}, {3, 4}};
    c.layers = {Layer::Bands, Layer::Legend};
    c.dots = true;
    const Config back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(back.window, 70u);
    EXPECT_EQ(back.hull_mode, HullMode::Convex);
    EXPECT_EQ(back.series_colors.at("owl"), "#123456");
    // A sidecar document is accepted as a config source.
    const Config from_sidecar = config_from_json(json{{"format", "phoenixmap-sidecar"}, {"config", to_json(c)}});
    EXPECT_EQ(to_json(from_sidecar), to_json(c));
    EXPECT_THROW(config_from_json(json{{"segments", "many"}}), Error);
    EXPECT_THROW(hull_mode_from_string("round"), Error);
}

TEST(Synthetic, SeedIsReproducible)
{
    for (auto kind : {SynthKind::Uniform, SynthKind::Gaussian, SynthKind::Ring, SynthKind::Mixture}) {
        const auto a = generate_synthetic(kind, 500, 99), b = generate_synthetic(kind, 500, 99);
        const auto c = generate_synthetic(kind, 500, 100);
        ASSERT_EQ(a.size(), 500u);
        bool same = true, differ = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            same = same && a.rows[i].x == b.rows[i].x && a.rows[i].y == b.rows[i].y;
            differ = differ || a.rows[i].x != c.rows[i].x;
        }
        EXPECT_TRUE(same);
        EXPECT_TRUE(differ);
    }
}

TEST(Synthetic, GaussianMeanWithinThreeStandardErrors)
{
    const SynthParams p;
    const std::size_t N = 10000;
    const auto t = generate_synthetic(SynthKind::Gaussian, N, 7, p);
    double mx = 0, my = 0;
    for (const auto& r : t.rows) {
        mx += r.x;
        my += r.y;
    }
    mx /= N;
    my /= N;
    const double se = p.sigma / std::sqrt(static_cast<double>(N));
    EXPECT_LE(std::abs(mx - p.center.x), 3 * se);
    EXPECT_LE(std::abs(my - p.center.y), 3 * se);
}

TEST(Synthetic, RingRadiiInRangeUniformInBounds)
{
    const SynthParams p;
    for (const auto& r : generate_synthetic(SynthKind::Ring, 5000, 3, p).rows) {
        const double d = std::hypot(r.x - p.center.x, r.y - p.center.y);
        EXPECT_GE(d, p.inner_radius - 1e-9);
        EXPECT_LE(d, p.outer_radius + 1e-9);
    }
    for (const auto& r : generate_synthetic(SynthKind::Uniform, 5000, 3, p).rows) {
        EXPECT_GE(r.x, p.bounds.min.x);
        EXPECT_LE(r.x, p.bounds.max.x);
        EXPECT_GE(r.y, p.bounds.min.y);
        EXPECT_LE(r.y, p.bounds.max.y);
    }
    EXPECT_THROW(generate_synthetic(SynthKind::Uniform, 0, 1), Error);
    EXPECT_THROW(synth_kind_from_string("spiral"), Error);
}

TEST(Errors, InputVersusGeometryClasses)
{
    EXPECT_TRUE(is_input_error(ErrorCode::ParseError));
    EXPECT_TRUE(is_input_error(ErrorCode::NonFiniteCoordinate));
    EXPECT_TRUE(is_input_error(ErrorCode::InvalidConfig));
    EXPECT_FALSE(is_input_error(ErrorCode::OffsetSelfIntersection));
    EXPECT_FALSE(is_input_error(ErrorCode::CollinearInput));
    const Error e(ErrorCode::BadWindow, "x");
    EXPECT_EQ(std::string(e.what()), std::string(to_string(ErrorCode::BadWindow)) + ": x");
}
