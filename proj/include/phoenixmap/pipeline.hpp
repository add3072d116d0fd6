#ifndef PHOENIXMAP_PIPELINE_HPP
#define PHOENIXMAP_PIPELINE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "phoenixmap/color.hpp"
#include "phoenixmap/curve.hpp"
#include "phoenixmap/density.hpp"
#include "phoenixmap/error.hpp"
#include "phoenixmap/geometry.hpp"
#include "phoenixmap/io.hpp"
#include "phoenixmap/legend.hpp"
#include "phoenixmap/render.hpp"

namespace phoenixmap {

/// Everything computed for one (series, time) group.
struct GroupResult {
    std::optional<std::string> series;
    std::optional<std::string> time;
    std::vector<Point2> points;
    /// Outline before offsetting (hull or predefined ring).
    std::vector<Point2> outline;
    /// Ring the curve interpolates (outline grown by `offset`).
    std::vector<Point2> fitted_ring;
    double offset = 0.0;
    ClosedCurve curve;
    double curve_area = 0.0;
    SegmentedCurve segmented;
    std::vector<InscribedCircle> circles;
    SliceSet slices;
    WidthProfile profile;
    LegendSpec legend;
    PhoenixBand band;

    std::string title() const
    {
        std::string t = series.value_or("");
        if (time)
            t += (t.empty() ? "" : " ") + *time;
        return t.empty() ? "all points" : t;
    }
};

struct PipelineResult {
    /// Config with the window and scale resolved to the values used.
    Config config;
    std::vector<GroupResult> groups;
    std::vector<std::string> warnings;
    RenderSpec spec;
    std::optional<HeatLayer> heat;
    std::string svg;
    json sidecar;
};

inline constexpr double canvas_margin = 20.0;
inline constexpr double legend_panel_width = 200.0;

namespace detail {

inline std::string group_name(const PointSet& g)
{
    return "series=" + g.series_label.value_or("-") + " time=" + g.time_label.value_or("-");
}

struct FittedCurve {
    std::vector<Point2> outline;
    std::vector<Point2> ring;
    double offset = 0.0;
    ClosedCurve curve;
};

/// Concave bends of the curve must have a radius of at least `min_radius`.
/// Returns a reflex outline vertex behind the sharpest violating bend whose
/// removal keeps the outline simple. Knot j of the curve is vertex j.
inline std::optional<std::size_t> sharpest_dent(const ClosedCurve& curve, std::span<const Point2> outline, double min_radius)
{
    const std::size_t m = curve.size();
    if (m != outline.size() || m <= 3)
        return std::nullopt;
    std::vector<double> worst(m, 0.0);
    constexpr int samples = 8;
    for (std::size_t j = 0; j < m; ++j) {
        for (int k = 0; k < samples; ++k) {
            const double t = static_cast<double>(k) / samples;
            const double kappa = -curve.curvature({j, t});
            const std::size_t knot = t < 0.5 ? j : (j + 1) % m;
            worst[knot] = std::max(worst[knot], kappa);
        }
    }
    // A tight bend next to a hairpin can sit on a convex knot; the reflex
    // vertex causing it is then one or two positions away.
    auto removable = [&](std::size_t j) -> std::optional<std::size_t> {
        for (std::size_t d : {std::size_t{0}, std::size_t{1}, m - 1, std::size_t{2}, m - 2}) {
            const std::size_t c = (j + d) % m;
            if (detail::is_reflex(outline, c) && detail::bridge_is_clear(outline, c))
                return c;
        }
        return std::nullopt;
    };
    std::optional<std::size_t> pick;
    double sharpest = 1.0 / min_radius;
    for (std::size_t j = 0; j < m; ++j) {
        if (worst[j] <= sharpest)
            continue;
        if (const auto c = removable(j)) {
            sharpest = worst[j];
            pick = c;
        }
    }
    return pick;
}

/// Grows the outline by b and fits the closed curve. When the grown ring
/// folds, the inlet behind the fold is bridged; when the fitted curve
/// self-intersects, the shallowest notch is filled. With `close_dents`, reflex
/// vertices that bend the curve tighter than radius b are bridged as well.
/// Once nothing applies b is halved.
inline FittedCurve fit_outline(std::vector<Point2> outline, std::optional<double> b, bool close_dents)
{
    constexpr int max_attempts = 1024;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Point2> ring = outline;
        bool folded = false;
        if (b) {
            try {
                const Outline grown = offset_outline(Outline::trusted(outline), *b);
                ring.assign(grown.vertices().begin(), grown.vertices().end());
            } catch (const Error& e) {
                if (e.code() != ErrorCode::OffsetSelfIntersection)
                    throw;
                folded = true;
            }
        }
        if (folded) {
            if (bridge_offset_fold(outline, *b) || fill_shallowest_notch(outline))
                continue;
        } else {
            // Predefined outlines are densified so the curve hugs their edges.
            ClosedCurve curve = fit_closed_bezier(close_dents ? ring : densify(ring, perimeter(ring) / 256.0));
            if (CurveIndex(curve).is_simple()) {
                if (close_dents && b) {
                    if (const auto dent = sharpest_dent(curve, outline, *b)) {
                        outline.erase(outline.begin() + static_cast<std::ptrdiff_t>(*dent));
                        continue;
                    }
                }
                return {std::move(outline), std::move(ring), b.value_or(0.0), std::move(curve)};
            }
            if (fill_shallowest_notch(outline))
                continue;
        }
        if (!b)
            break;
        *b *= 0.5;
    }
    throw Error(ErrorCode::OffsetSelfIntersection, "could not fit a simple curve around the outline");
}

inline GroupResult process_group(const PointSet& group, const Config& config, const std::optional<Outline>& predefined)
{
    GroupResult out;
    out.series = group.series_label;
    out.time = group.time_label;
    out.points = group.points;

    std::vector<Point2> outline;
    std::optional<double> b = config.offset;
    switch (config.hull_mode) {
    case HullMode::Predefined: {
        if (!predefined)
            throw Error(ErrorCode::InvalidConfig, "hull mode 'predefined' needs an outline");
        outline.assign(predefined->vertices().begin(), predefined->vertices().end());
        break;
    }
    case HullMode::Concave:
    case HullMode::Convex: {
        const Outline hull = config.hull_mode == HullMode::Concave ? concave_hull(group, config.hull_k) : convex_hull(group);
        outline.assign(hull.vertices().begin(), hull.vertices().end());
        if (!b)
            b = 0.02 * bounding_box(group.points).diagonal();
        // Dilating by b swallows notches shallower than b; the miter offset
        // alone would keep them as wiggles in the curve.
        fill_notches_shallower_than(outline, *b);
        break;
    }
    }

    FittedCurve fitted = fit_outline(std::move(outline), b, config.hull_mode != HullMode::Predefined);
    out.outline = std::move(fitted.outline);
    out.fitted_ring = std::move(fitted.ring);
    out.offset = fitted.offset;
    out.curve = std::move(fitted.curve);

    const CurveIndex index(out.curve);
    out.curve_area = index.area();
    out.segmented = segment_curve(out.curve, index, config.segments);
    out.circles = inscribed_circles(out.curve, index, out.segmented);
    out.slices = build_slices(out.segmented, out.circles, out.points, index);
    out.profile = smooth_widths(out.slices.slices, config.resolved_window());
    return out;
}

inline std::vector<std::string> distinct_series(const std::vector<GroupResult>& groups)
{
    std::set<std::string> s;
    for (const auto& g : groups)
        s.insert(g.series.value_or(""));
    return {s.begin(), s.end()};
}

inline json points_json(std::span<const Point2> pts)
{
    json a = json::array();
    for (const auto& p : pts)
        a.push_back({p.x, p.y});
    return a;
}

inline std::vector<Point2> points_from_json(const json& a)
{
    std::vector<Point2> pts;
    pts.reserve(a.size());
    for (const auto& p : a)
        pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return pts;
}

inline json optional_label(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

inline json make_sidecar(const PipelineResult& r)
{
    json groups = json::array();
    for (const auto& g : r.groups) {
        std::vector<double> radii, counts, areas;
        std::vector<Point2> centers;
        for (const auto& c : g.circles) {
            radii.push_back(c.radius);
            centers.push_back(c.center);
        }
        for (const auto& s : g.slices.slices) {
            counts.push_back(static_cast<double>(s.count));
            areas.push_back(s.area);
        }
        json bars = json::array();
        for (const auto& bar : g.legend.width_bars)
            bars.push_back({{"width", bar.width}, {"density", bar.density}, {"label", bar.label}});
        groups.push_back({
            {"series", optional_label(g.series)},
            {"time", optional_label(g.time)},
            {"point_count", g.points.size()},
            {"points_inside", g.slices.points_inside},
            {"outline", points_json(g.outline)},
            {"offset", g.offset},
            {"fitted_ring", points_json(g.fitted_ring)},
            {"curve_length", g.segmented.length},
            {"curve_area", g.curve_area},
            {"divisor_count", g.segmented.size()},
            {"divisors", points_json(g.segmented.divisors)},
            {"inward_normals", points_json(g.segmented.inward_normals)},
            {"circle_centers", points_json(centers)},
            {"radii", radii},
            {"slice_counts", counts},
            {"slice_areas", areas},
            {"raw_widths", g.profile.raw},
            {"smoothed_widths", g.profile.smoothed},
            {"widths", g.profile.widths},
            {"applied_widths", g.band.applied_widths},
            {"color", g.band.color},
            {"opacity", g.band.opacity},
            {"legend",
                {{"title", g.legend.title},
                    {"units", g.legend.units_name},
                    {"color", g.legend.color},
                    {"radial_profile", g.legend.radial_profile},
                    {"width_bars", bars}}},
        });
        if (r.config.dots)
            groups.back()["points"] = points_json(g.points);
    }
    json doc{
        {"format", "phoenixmap-sidecar"},
        {"version", 1},
        {"config", to_json(r.config)},
        {"canvas",
            {{"width", r.spec.width},
                {"height", r.spec.height},
                {"legend_x", r.spec.legend_x},
                {"transform", {r.spec.transform.scale, r.spec.transform.offset_x, r.spec.transform.offset_y}}}},
        {"warnings", r.warnings},
        {"groups", groups},
    };
    if (r.heat) {
        const auto& h = *r.heat;
        doc["heat"] = {{"extent", {h.extent.min.x, h.extent.min.y, h.extent.max.x, h.extent.max.y}},
            {"cols", h.cols}, {"rows", h.rows}, {"cell", h.cell}, {"bandwidth", h.bandwidth}, {"png", h.png_base64}};
    } else {
        doc["heat"] = nullptr;
    }
    return doc;
}

} // namespace detail

inline std::string render_from_sidecar(const json& doc);

/// Full run: one Phoenixmap per (series, time) group, composited into one SVG.
/// Groups with fewer than 3 points are skipped with a warning.
inline PipelineResult run_pipeline(const SeriesTable& table, const Config& config, const std::optional<Outline>& outline = std::nullopt)
{
    config.validate();
    PipelineResult result;
    result.config = config;
    result.config.window = config.resolved_window();

    for (const auto& group : table.groups()) {
        if (group.points.size() < 3) {
            result.warnings.push_back("skipping group " + detail::group_name(group) + ": "
                + std::to_string(group.points.size()) + " point(s), at least 3 needed");
            continue;
        }
        try {
            result.groups.push_back(detail::process_group(group, result.config, outline));
        } catch (const LocatedError&) {
            throw;
        } catch (const Error& e) {
            throw Error(e.code(), "group " + detail::group_name(group) + ": " + e.detail());
        }
    }
    if (result.groups.empty())
        throw Error(ErrorCode::EmptyScene, "no group has enough points to draw");

    // One transform for every layer.
    BoundingBox extent;
    if (config.extent) {
        extent = *config.extent;
    } else {
        for (const auto& g : result.groups) {
            for (const auto& p : g.segmented.divisors)
                extent.expand(p);
        }
    }
    RenderSpec& spec = result.spec;
    spec.width = config.canvas_width;
    spec.height = config.canvas_height;
    spec.layers = config.layers;
    spec.background = config.background;
    const double map_width = config.legend ? config.canvas_width - legend_panel_width : config.canvas_width;
    spec.legend_x = map_width + 10.0;
    spec.transform = fit_transform(extent, map_width, config.canvas_height, canvas_margin);
    const double units_per_render = 1.0 / spec.transform.scale;

    // One width scale shared by all groups so widths compare across bands.
    double peak = 0.0;
    for (const auto& g : result.groups)
        for (double w : g.profile.smoothed)
            peak = std::max(peak, w);
    const double c = config.scale ? *config.scale : auto_scale(peak, config.max_width);
    result.config.scale = c;

    const auto series_names = detail::distinct_series(result.groups);
    const auto palette = named_palette(config.palette);
    for (auto& g : result.groups) {
        g.profile = scale_widths(std::move(g.profile), c);
        g.band = build_band(g.segmented, g.circles, g.profile, units_per_render);
        g.band.series = g.series.value_or("");
        g.band.time = g.time.value_or("");
        g.band.opacity = config.opacity;
        const std::string key = g.series.value_or("");
        if (auto it = config.series_colors.find(key); it != config.series_colors.end()) {
            g.band.color = it->second;
        } else {
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(series_names.begin(), series_names.end(), key) - series_names.begin());
            g.band.color = palette[pos % palette.size()];
        }
    }

    // A single series observed at several times is colored along the time ramp.
    std::set<std::string> times;
    for (const auto& g : result.groups)
        times.insert(g.time.value_or(""));
    if (series_names.size() == 1 && times.size() >= 2 && config.series_colors.empty()) {
        std::vector<PhoenixBand> bands;
        for (const auto& g : result.groups)
            bands.push_back(g.band);
        bands = render_time_gradient(std::move(bands), parse_hex_color(config.time_start), parse_hex_color(config.time_end));
        std::stable_sort(result.groups.begin(), result.groups.end(),
            [](const GroupResult& a, const GroupResult& b) { return a.band.time < b.band.time; });
        for (std::size_t k = 0; k < bands.size(); ++k)
            result.groups[k].band.color = bands[k].color;
    }

    for (auto& g : result.groups) {
        g.legend.radial_profile = radial_profile(g.slices.slices, g.points, g.slices.assignment, config.legend_bins);
        g.legend.width_bars = width_bars(g.profile, config.legend_bars, g.legend.units_name);
        for (auto& bar : g.legend.width_bars)
            bar.width = bar.density * c;
        g.legend.title = g.title();
        g.legend.color = g.band.color;
    }

    if (config.heat_bandwidth) {
        std::vector<Point2> all;
        for (const auto& r : table.rows)
            all.push_back({r.x, r.y});
        result.heat = render_heat_reference(all, *config.heat_bandwidth);
    }

    result.sidecar = detail::make_sidecar(result);
    result.svg = render_from_sidecar(result.sidecar);
    return result;
}

/// Rebuilds the SVG from the intermediates stored in a sidecar document.
inline std::string render_from_sidecar(const json& doc)
{
    try {
        const Config config = config_from_json(doc);
        const auto& canvas = doc.at("canvas");
        RenderSpec spec;
        spec.width = canvas.at("width").get<double>();
        spec.height = canvas.at("height").get<double>();
        spec.legend_x = canvas.at("legend_x").get<double>();
        const auto& t = canvas.at("transform");
        spec.transform = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
        spec.layers = config.layers;
        spec.background = config.background;
        const double units_per_render = 1.0 / spec.transform.scale;

        std::vector<PhoenixBand> bands;
        std::vector<LegendSpec> legends;
        std::vector<DotSeries> dots;
        for (const auto& g : doc.at("groups")) {
            const auto divisors = detail::points_from_json(g.at("divisors"));
            const auto normals = detail::points_from_json(g.at("inward_normals"));
            const auto radii = g.at("radii").get<std::vector<double>>();
            const auto widths = g.at("widths").get<std::vector<double>>();
            PhoenixBand band = build_band(divisors, normals, radii, widths, units_per_render);
            band.color = g.at("color").get<std::string>();
            band.opacity = g.at("opacity").get<double>();
            band.series = g.at("series").is_null() ? "" : g.at("series").get<std::string>();
            band.time = g.at("time").is_null() ? "" : g.at("time").get<std::string>();
            bands.push_back(std::move(band));

            const auto& lg = g.at("legend");
            LegendSpec legend;
            legend.title = lg.at("title").get<std::string>();
            legend.units_name = lg.at("units").get<std::string>();
            legend.color = lg.at("color").get<std::string>();
            legend.radial_profile = lg.at("radial_profile").get<std::vector<double>>();
            for (const auto& bar : lg.at("width_bars"))
                legend.width_bars.push_back(
                    {bar.at("width").get<double>(), bar.at("density").get<double>(), bar.at("label").get<std::string>()});
            legends.push_back(std::move(legend));

            if (config.dots && g.contains("points"))
                dots.push_back({detail::points_from_json(g.at("points")), bands.back().color});
        }
        if (!config.legend)
            legends.clear();

        std::optional<HeatLayer> heat;
        if (doc.contains("heat") && !doc.at("heat").is_null()) {
            const auto& h = doc.at("heat");
            HeatLayer layer;
            const auto e = h.at("extent").get<std::vector<double>>();
            layer.extent.expand(Point2{e.at(0), e.at(1)});
            layer.extent.expand(Point2{e.at(2), e.at(3)});
            layer.cols = h.at("cols").get<std::size_t>();
            layer.rows = h.at("rows").get<std::size_t>();
            layer.cell = h.at("cell").get<double>();
            layer.bandwidth = h.at("bandwidth").get<double>();
            layer.png_base64 = h.at("png").get<std::string>();
            heat = std::move(layer);
        }
        return render_svg(spec, bands, legends, dots, heat ? &*heat : nullptr);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed sidecar: ") + e.what());
    }
}

} // namespace phoenixmap

#endif
