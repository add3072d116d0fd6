#ifndef PHOENIXMAP_RENDER_HPP
#define PHOENIXMAP_RENDER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phoenixmap/color.hpp"
#include "phoenixmap/curve.hpp"
#include "phoenixmap/density.hpp"
#include "phoenixmap/geometry.hpp"
#include "phoenixmap/legend.hpp"
#include "phoenixmap/raster.hpp"

namespace phoenixmap {

/// Map-to-canvas affine map with a flipped y axis:
/// canvas = (offset_x + scale * x, offset_y - scale * y).
struct Transform {
    double scale = 1.0;
    double offset_x = 0.0;
    double offset_y = 0.0;

    Point2 apply(Point2 p) const noexcept { return {offset_x + scale * p.x, offset_y - scale * p.y}; }
    Point2 invert(Point2 c) const noexcept { return {(c.x - offset_x) / scale, (offset_y - c.y) / scale}; }
    bool invertible() const noexcept { return scale != 0.0 && std::isfinite(scale); }
};

/// Uniform scale placing `extent` centered inside the rectangle
/// [margin, width - margin] x [margin, height - margin].
inline Transform fit_transform(const BoundingBox& extent, double width, double height, double margin)
{
    const double avail_w = width - 2.0 * margin;
    const double avail_h = height - 2.0 * margin;
    if (extent.empty() || !(avail_w > 0.0) || !(avail_h > 0.0))
        throw Error(ErrorCode::InvalidConfig, "canvas is too small for the map extent");
    const double ew = std::max(extent.width(), 1e-12);
    const double eh = std::max(extent.height(), 1e-12);
    const double scale = std::min(avail_w / ew, avail_h / eh);
    const Point2 c = extent.center();
    return {scale, margin + 0.5 * avail_w - scale * c.x, margin + 0.5 * avail_h + scale * c.y};
}

/// Filled region between the curve and its inward offset by the local width.
struct PhoenixBand {
    std::vector<Point2> outer;
    std::vector<Point2> inner;
    /// Offset actually applied per divisor, in map units, after clamping.
    std::vector<double> applied_widths;
    std::string color = "#000000";
    double opacity = 0.85;
    std::string series;
    std::string time;

    double area() const noexcept { return polygon_area(outer) - polygon_area(inner); }
};

inline constexpr double band_clamp_fraction = 0.95;

/// `widths` are in render units; `units_per_render` converts them to map units.
/// Each width is clamped to 0.95 of the inscribed-circle radius so the inner
/// boundary stays inside that circle.
inline PhoenixBand build_band(std::span<const Point2> divisors, std::span<const Point2> inward_normals,
    std::span<const double> radii, std::span<const double> widths, double units_per_render)
{
    const std::size_t n = divisors.size();
    if (inward_normals.size() != n || radii.size() != n || widths.size() != n)
        throw Error(ErrorCode::InvalidConfig, "band inputs must all have one entry per divisor");
    PhoenixBand band;
    band.outer.assign(divisors.begin(), divisors.end());
    band.inner.resize(n);
    band.applied_widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::clamp(widths[i] * units_per_render, 0.0, band_clamp_fraction * radii[i]);
        band.applied_widths[i] = w;
        band.inner[i] = divisors[i] + w * inward_normals[i];
    }
    return band;
}

inline PhoenixBand build_band(const SegmentedCurve& curve, std::span<const InscribedCircle> circles,
    const WidthProfile& widths, double units_per_render = 1.0)
{
    std::vector<double> radii(circles.size());
    for (std::size_t i = 0; i < circles.size(); ++i)
        radii[i] = circles[i].radius;
    return build_band(curve.divisors, curve.inward_normals, radii, widths.widths, units_per_render);
}

/// Orders bands by time label (stable) and colors them along a CIELAB ramp
/// from `start` (earliest) to `end` (latest); the latest band comes last so
/// it is drawn on top.
inline std::vector<PhoenixBand> render_time_gradient(std::vector<PhoenixBand> bands, Rgb start, Rgb end)
{
    if (bands.size() < 2)
        throw Error(ErrorCode::InvalidConfig, "a time gradient needs at least two time steps");
    std::stable_sort(bands.begin(), bands.end(), [](const PhoenixBand& a, const PhoenixBand& b) { return a.time < b.time; });
    const double last = static_cast<double>(bands.size() - 1);
    for (std::size_t k = 0; k < bands.size(); ++k)
        bands[k].color = to_hex(mix_perceptual(start, end, static_cast<double>(k) / last));
    return bands;
}

/// Gaussian kernel density raster; row 0 is the top (largest y).
struct HeatLayer {
    BoundingBox extent;
    std::size_t cols = 0;
    std::size_t rows = 0;
    double cell = 0.0;
    double bandwidth = 0.0;
    std::vector<double> values;
    std::string png_base64;

    double at(std::size_t row, std::size_t col) const noexcept { return values[row * cols + col]; }
    Point2 cell_center(std::size_t row, std::size_t col) const noexcept
    {
        return {extent.min.x + (static_cast<double>(col) + 0.5) * cell, extent.max.y - (static_cast<double>(row) + 0.5) * cell};
    }
    /// Riemann sum of the density over the grid.
    double integral() const noexcept
    {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s * cell * cell;
    }
};

inline constexpr std::string_view heat_low_color = "#2c7bb6";
inline constexpr std::string_view heat_high_color = "#d7191c";

inline std::string encode_heat_png(const HeatLayer& layer)
{
    const double peak = layer.values.empty() ? 0.0 : *std::max_element(layer.values.begin(), layer.values.end());
    const Rgb lo = parse_hex_color(heat_low_color), hi = parse_hex_color(heat_high_color);
    std::vector<std::uint8_t> rgba(layer.cols * layer.rows * 4);
    for (std::size_t k = 0; k < layer.values.size(); ++k) {
        const double t = peak > 0.0 ? layer.values[k] / peak : 0.0;
        const Rgb c = mix_perceptual(lo, hi, t);
        rgba[4 * k] = c.r;
        rgba[4 * k + 1] = c.g;
        rgba[4 * k + 2] = c.b;
        rgba[4 * k + 3] = static_cast<std::uint8_t>(std::lround(200.0 * std::sqrt(std::clamp(t, 0.0, 1.0))));
    }
    return base64_encode(encode_png_rgba(rgba, layer.cols, layer.rows));
}

/// Kernel density sum_p N(x; p, h^2 I) evaluated at cell centers of a grid
/// covering the points padded by 4h. The kernel is truncated at 4h.
inline HeatLayer render_heat_reference(std::span<const Point2> points, double bandwidth, std::size_t max_cols = 256)
{
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw Error(ErrorCode::InvalidConfig, "heat bandwidth must be positive");
    if (points.empty())
        throw Error(ErrorCode::TooFewPoints, "heat layer needs at least one point");
    HeatLayer layer;
    layer.bandwidth = bandwidth;
    BoundingBox box = bounding_box(points);
    const double pad = 4.0 * bandwidth;
    box.min -= Point2{pad, pad};
    box.max += Point2{pad, pad};
    layer.cell = std::max(box.width(), box.height()) / static_cast<double>(max_cols);
    layer.cols = static_cast<std::size_t>(std::ceil(box.width() / layer.cell));
    layer.rows = static_cast<std::size_t>(std::ceil(box.height() / layer.cell));
    box.max = {box.min.x + layer.cell * static_cast<double>(layer.cols), box.min.y + layer.cell * static_cast<double>(layer.rows)};
    layer.extent = box;
    layer.values.assign(layer.cols * layer.rows, 0.0);

    const double norm_factor = 1.0 / (2.0 * std::numbers::pi * bandwidth * bandwidth);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<double> wx, wy;
    for (const auto& p : points) {
        const double fc0 = (p.x - pad - box.min.x) / layer.cell - 0.5;
        const double fc1 = (p.x + pad - box.min.x) / layer.cell - 0.5;
        const double fr0 = (box.max.y - (p.y + pad)) / layer.cell - 0.5;
        const double fr1 = (box.max.y - (p.y - pad)) / layer.cell - 0.5;
        const auto c0 = static_cast<std::size_t>(std::max(0.0, std::ceil(fc0)));
        const auto c1 = static_cast<std::size_t>(std::clamp(std::floor(fc1), 0.0, static_cast<double>(layer.cols - 1)));
        const auto r0 = static_cast<std::size_t>(std::max(0.0, std::ceil(fr0)));
        const auto r1 = static_cast<std::size_t>(std::clamp(std::floor(fr1), 0.0, static_cast<double>(layer.rows - 1)));
        wx.assign(c1 - c0 + 1, 0.0);
        wy.assign(r1 - r0 + 1, 0.0);
        for (std::size_t c = c0; c <= c1; ++c) {
            const double dx = layer.cell_center(0, c).x - p.x;
            wx[c - c0] = std::exp(-dx * dx * inv2h2);
        }
        for (std::size_t r = r0; r <= r1; ++r) {
            const double dy = layer.cell_center(r, 0).y - p.y;
            wy[r - r0] = norm_factor * std::exp(-dy * dy * inv2h2);
        }
        for (std::size_t r = r0; r <= r1; ++r) {
            double* row = layer.values.data() + r * layer.cols;
            for (std::size_t c = c0; c <= c1; ++c)
                row[c] += wy[r - r0] * wx[c - c0];
        }
    }
    layer.png_base64 = encode_heat_png(layer);
    return layer;
}

struct DotSeries {
    std::vector<Point2> points;
    std::string color = "#000000";
    double radius = 1.5;
    double opacity = 0.7;
};

enum class Layer { Heat, Bands, Dots, Legend };

inline std::string_view to_string(Layer l) noexcept
{
    switch (l) {
    case Layer::Heat: return "heat";
    case Layer::Bands: return "bands";
    case Layer::Dots: return "dots";
    case Layer::Legend: return "legend";
    }
    return "";
}

inline std::optional<Layer> layer_from_string(std::string_view s) noexcept
{
    for (Layer l : {Layer::Heat, Layer::Bands, Layer::Dots, Layer::Legend})
        if (to_string(l) == s)
            return l;
    return std::nullopt;
}

struct RenderSpec {
    double width = 1000.0;
    double height = 800.0;
    Transform transform;
    std::vector<Layer> layers{Layer::Heat, Layer::Bands, Layer::Dots, Layer::Legend};
    /// Horizontal start of the legend panel on the canvas.
    double legend_x = 800.0;
    std::optional<std::string> background;
};

namespace detail {

/// Fixed three-decimal formatting; negative zero prints as zero.
inline void append_number(std::string& out, double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    if (std::string_view(buf) == "-0.000")
        out += "0.000";
    else
        out += buf;
}

inline std::string num(double v)
{
    std::string s;
    append_number(s, v);
    return s;
}

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline void append_ring(std::string& d, std::span<const Point2> ring, const Transform& t, bool reverse)
{
    const std::size_t n = ring.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 c = t.apply(ring[reverse ? n - 1 - k : k]);
        d += k == 0 ? "M" : " L";
        append_number(d, c.x);
        d += ' ';
        append_number(d, c.y);
    }
    d += " Z";
}

inline void render_legends(std::string& svg, const RenderSpec& spec, std::span<const LegendSpec> legends)
{
    if (legends.empty())
        return;
    const double top = 20.0;
    const double slot = std::min(260.0, (spec.height - 2.0 * top) / static_cast<double>(legends.size()));
    svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t k = 0; k < legends.size(); ++k) {
        const LegendSpec& lg = legends[k];
        const double y0 = top + slot * static_cast<double>(k);
        const double box_w = 24.0;
        const double box_h = std::max(20.0, slot - 36.0);
        const double box_x = spec.legend_x;
        const double box_y = y0 + 14.0;
        svg += "<text x=\"" + num(box_x) + "\" y=\"" + num(y0 + 10.0) + "\">" + xml_escape(lg.title) + "</text>\n";
        const auto& prof = lg.radial_profile;
        const double peak = prof.empty() ? 0.0 : *std::max_element(prof.begin(), prof.end());
        const double stripe = prof.empty() ? 0.0 : box_h / static_cast<double>(prof.size());
        for (std::size_t j = 0; j < prof.size(); ++j) {
            const double alpha = peak > 0.0 ? prof[j] / peak : 0.0;
            svg += "<rect x=\"" + num(box_x) + "\" y=\"" + num(box_y + stripe * static_cast<double>(j)) + "\" width=\""
                + num(box_w) + "\" height=\"" + num(stripe) + "\" fill=\"" + lg.color + "\" fill-opacity=\"" + num(alpha)
                + "\"/>\n";
        }
        svg += "<rect x=\"" + num(box_x) + "\" y=\"" + num(box_y) + "\" width=\"" + num(box_w) + "\" height=\""
            + num(box_h) + "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
        double bar_y = box_y;
        const double bar_x = box_x + box_w + 10.0;
        for (const auto& bar : lg.width_bars) {
            bar_y += 0.5 * bar.width + 6.0;
            svg += "<line x1=\"" + num(bar_x) + "\" y1=\"" + num(bar_y) + "\" x2=\"" + num(bar_x + 30.0) + "\" y2=\""
                + num(bar_y) + "\" stroke=\"" + lg.color + "\" stroke-width=\"" + num(bar.width) + "\"/>\n";
            svg += "<text x=\"" + num(bar_x + 36.0) + "\" y=\"" + num(bar_y + 3.0) + "\">" + xml_escape(bar.label)
                + "</text>\n";
            bar_y += 0.5 * bar.width;
        }
    }
    svg += "</g>\n";
}

} // namespace detail

/// Deterministic SVG 1.1 document. Layers follow spec.layers; within a layer
/// elements follow input order. Each band is exactly one path element.
inline std::string render_svg(const RenderSpec& spec, std::span<const PhoenixBand> bands,
    std::span<const LegendSpec> legends, std::span<const DotSeries> dots = {}, const HeatLayer* heat = nullptr)
{
    if (bands.empty() && legends.empty() && dots.empty() && heat == nullptr)
        throw Error(ErrorCode::EmptyScene, "nothing to render");
    if (!spec.transform.invertible())
        throw Error(ErrorCode::InvalidConfig, "render transform is not invertible");
    using detail::num;
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\""
        + num(spec.width) + "\" height=\"" + num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) + " "
        + num(spec.height) + "\">\n";
    if (spec.background)
        svg += "<image x=\"0.000\" y=\"0.000\" width=\"" + num(spec.width) + "\" height=\"" + num(spec.height)
            + "\" preserveAspectRatio=\"none\" xlink:href=\"" + detail::xml_escape(*spec.background) + "\"/>\n";
    for (Layer layer : spec.layers) {
        switch (layer) {
        case Layer::Heat:
            if (heat) {
                const Point2 tl = spec.transform.apply({heat->extent.min.x, heat->extent.max.y});
                const Point2 br = spec.transform.apply({heat->extent.max.x, heat->extent.min.y});
                svg += "<image id=\"heat\" x=\"" + num(tl.x) + "\" y=\"" + num(tl.y) + "\" width=\"" + num(br.x - tl.x)
                    + "\" height=\"" + num(br.y - tl.y) + "\" preserveAspectRatio=\"none\" xlink:href=\"data:image/png;base64,"
                    + heat->png_base64 + "\"/>\n";
            }
            break;
        case Layer::Bands:
            for (const auto& band : bands) {
                std::string d;
                d.reserve(band.outer.size() * 36);
                detail::append_ring(d, band.outer, spec.transform, false);
                d += ' ';
                detail::append_ring(d, band.inner, spec.transform, true);
                svg += "<path class=\"phoenix-band\" data-series=\"" + detail::xml_escape(band.series) + "\" data-time=\""
                    + detail::xml_escape(band.time) + "\" fill=\"" + band.color + "\" fill-opacity=\"" + num(band.opacity)
                    + "\" fill-rule=\"evenodd\" stroke=\"none\" d=\"" + d + "\"/>\n";
            }
            break;
        case Layer::Dots:
            for (const auto& series : dots) {
                svg += "<g class=\"dots\" fill=\"" + series.color + "\" fill-opacity=\"" + num(series.opacity) + "\">\n";
                for (const auto& p : series.points) {
                    const Point2 c = spec.transform.apply(p);
                    svg += "<circle cx=\"" + num(c.x) + "\" cy=\"" + num(c.y) + "\" r=\"" + num(series.radius) + "\"/>\n";
                }
                svg += "</g>\n";
            }
            break;
        case Layer::Legend:
            detail::render_legends(svg, spec, legends);
            break;
        }
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace phoenixmap

#endif
