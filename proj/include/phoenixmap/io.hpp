#ifndef PHOENIXMAP_IO_HPP
#define PHOENIXMAP_IO_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "phoenixmap/color.hpp"
#include "phoenixmap/error.hpp"
#include "phoenixmap/geometry.hpp"
#include "phoenixmap/render.hpp"

namespace phoenixmap {

using json = nlohmann::json;

enum class HullMode { Concave, Convex, Predefined };

inline std::string_view to_string(HullMode m) noexcept
{
    switch (m) {
    case HullMode::Concave: return "concave";
    case HullMode::Convex: return "convex";
    case HullMode::Predefined: return "predefined";
    }
    return "";
}

inline HullMode hull_mode_from_string(std::string_view s)
{
    for (HullMode m : {HullMode::Concave, HullMode::Convex, HullMode::Predefined})
        if (to_string(m) == s)
            return m;
    throw Error(ErrorCode::InvalidConfig, "unknown hull mode '" + std::string(s) + "'");
}

/// Run configuration. Unset optionals resolve at run time: window to n/10,
/// scale so the widest band is max_width, offset to 2% of the group's
/// bounding-box diagonal (computed outlines only).
struct Config {
    std::size_t segments = 3000;
    std::optional<std::size_t> window;
    std::optional<double> scale;
    double max_width = 30.0;
    std::optional<double> offset;
    std::size_t hull_k = 3;
    HullMode hull_mode = HullMode::Concave;
    std::size_t legend_bins = 100;
    std::size_t legend_bars = 3;
    bool legend = true;
    std::string palette = "qual6";
    std::map<std::string, std::string> series_colors;
    std::string time_start{default_time_start};
    std::string time_end{default_time_end};
    double opacity = 0.85;
    bool dots = false;
    std::optional<double> heat_bandwidth;
    double canvas_width = 1000.0;
    double canvas_height = 800.0;
    std::optional<BoundingBox> extent;
    std::optional<std::string> background;
    std::vector<Layer> layers{Layer::Heat, Layer::Bands, Layer::Dots, Layer::Legend};
    std::uint64_t seed = 42;
    std::string input_path;
    std::string outline_path;
    std::string out_path;
    std::string sidecar_path;

    std::size_t resolved_window() const noexcept
    {
        if (window)
            return *window;
        return std::clamp<std::size_t>(segments / 10, 1, segments / 2);
    }

    void validate() const
    {
        if (segments < 16)
            throw Error(ErrorCode::BadSegmentCount, "segments must be at least 16");
        const std::size_t x = resolved_window();
        if (x < 1 || 2 * x > segments)
            throw Error(ErrorCode::BadWindow, "window must lie in [1, segments/2]");
        if (scale && !(*scale > 0.0))
            throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
        if (!(max_width > 0.0))
            throw Error(ErrorCode::NonPositiveScale, "max width must be positive");
        if (offset && !(*offset > 0.0))
            throw Error(ErrorCode::InvalidConfig, "offset must be positive");
        if (hull_k < 3)
            throw Error(ErrorCode::InvalidConfig, "hull k must be at least 3");
        if (legend_bins < 2)
            throw Error(ErrorCode::InvalidConfig, "legend bins must be at least 2");
        if (legend_bars < 1)
            throw Error(ErrorCode::InvalidConfig, "legend bars must be at least 1");
        if (heat_bandwidth && !(*heat_bandwidth > 0.0))
            throw Error(ErrorCode::InvalidConfig, "heat bandwidth must be positive");
        if (!(opacity >= 0.0 && opacity <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "opacity must lie in [0, 1]");
        if (!(canvas_width > 0.0 && canvas_height > 0.0))
            throw Error(ErrorCode::InvalidConfig, "canvas must have positive size");
        named_palette(palette);
        parse_hex_color(time_start);
        parse_hex_color(time_end);
        for (const auto& [series, color] : series_colors)
            parse_hex_color(color);
    }
};

namespace detail {

template <class T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<T>();
}

} // namespace detail

inline json to_json(const Config& c)
{
    json layers = json::array();
    for (Layer l : c.layers)
        layers.push_back(std::string(to_string(l)));
    json j{
        {"segments", c.segments},
        {"window", c.resolved_window()},
        {"scale", detail::optional_json(c.scale)},
        {"max_width", c.max_width},
        {"offset", detail::optional_json(c.offset)},
        {"hull_k", c.hull_k},
        {"hull_mode", std::string(to_string(c.hull_mode))},
        {"legend_bins", c.legend_bins},
        {"legend_bars", c.legend_bars},
        {"legend", c.legend},
        {"palette", c.palette},
        {"series_colors", c.series_colors},
        {"time_start", c.time_start},
        {"time_end", c.time_end},
        {"opacity", c.opacity},
        {"dots", c.dots},
        {"heat_bandwidth", detail::optional_json(c.heat_bandwidth)},
        {"canvas_width", c.canvas_width},
        {"canvas_height", c.canvas_height},
        {"background", detail::optional_json(c.background)},
        {"layers", layers},
        {"seed", c.seed},
        {"input", c.input_path},
        {"outline", c.outline_path},
        {"out", c.out_path},
        {"sidecar", c.sidecar_path},
    };
    j["extent"] = c.extent ? json::array({c.extent->min.x, c.extent->min.y, c.extent->max.x, c.extent->max.y}) : json(nullptr);
    return j;
}

/// Reads a config object; a sidecar document (with a "config" member) is accepted too.
inline Config config_from_json(const json& doc)
{
    const json& j = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
    Config c;
    try {
        c.segments = j.value("segments", c.segments);
        c.window = detail::optional_from<std::size_t>(j, "window");
        c.scale = detail::optional_from<double>(j, "scale");
        c.max_width = j.value("max_width", c.max_width);
        c.offset = detail::optional_from<double>(j, "offset");
        c.hull_k = j.value("hull_k", c.hull_k);
        if (j.contains("hull_mode"))
            c.hull_mode = hull_mode_from_string(j.at("hull_mode").get<std::string>());
        c.legend_bins = j.value("legend_bins", c.legend_bins);
        c.legend_bars = j.value("legend_bars", c.legend_bars);
        c.legend = j.value("legend", c.legend);
        c.palette = j.value("palette", c.palette);
        if (j.contains("series_colors"))
            c.series_colors = j.at("series_colors").get<std::map<std::string, std::string>>();
        c.time_start = j.value("time_start", c.time_start);
        c.time_end = j.value("time_end", c.time_end);
        c.opacity = j.value("opacity", c.opacity);
        c.dots = j.value("dots", c.dots);
        c.heat_bandwidth = detail::optional_from<double>(j, "heat_bandwidth");
        c.canvas_width = j.value("canvas_width", c.canvas_width);
        c.canvas_height = j.value("canvas_height", c.canvas_height);
        c.background = detail::optional_from<std::string>(j, "background");
        if (j.contains("layers")) {
            c.layers.clear();
            for (const auto& l : j.at("layers")) {
                const auto layer = layer_from_string(l.get<std::string>());
                if (!layer)
                    throw Error(ErrorCode::InvalidConfig, "unknown layer '" + l.get<std::string>() + "'");
                c.layers.push_back(*layer);
            }
        }
        c.seed = j.value("seed", c.seed);
        c.input_path = j.value("input", c.input_path);
        c.outline_path = j.value("outline", c.outline_path);
        c.out_path = j.value("out", c.out_path);
        c.sidecar_path = j.value("sidecar", c.sidecar_path);
        if (j.contains("extent") && !j.at("extent").is_null()) {
            const auto e = j.at("extent").get<std::vector<double>>();
            if (e.size() != 4 || !(e[2] > e[0]) || !(e[3] > e[1]))
                throw Error(ErrorCode::InvalidConfig, "extent must be [minx, miny, maxx, maxy]");
            BoundingBox box;
            box.expand(Point2{e[0], e[1]});
            box.expand(Point2{e[2], e[3]});
            c.extent = box;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

struct SeriesRow {
    double x = 0.0;
    double y = 0.0;
    std::optional<std::string> series;
    std::optional<std::string> time;
};

/// Observation rows; (series, time) labels define the overlay groups.
struct SeriesTable {
    std::vector<SeriesRow> rows;

    std::size_t size() const noexcept { return rows.size(); }

    /// Rows grouped by (series, time) in lexicographic label order; missing
    /// labels sort first. Row order is preserved inside each group.
    std::vector<PointSet> groups() const
    {
        using Key = std::pair<std::optional<std::string>, std::optional<std::string>>;
        std::map<Key, PointSet> by_key;
        for (const auto& r : rows) {
            auto& g = by_key[{r.series, r.time}];
            g.series_label = r.series;
            g.time_label = r.time;
            g.points.push_back({r.x, r.y});
        }
        std::vector<PointSet> out;
        out.reserve(by_key.size());
        for (auto& [key, set] : by_key)
            out.push_back(std::move(set));
        return out;
    }
};

enum class PointFormat { Csv, GeoJson };

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    std::string out(s.substr(a, b - a));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

inline std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i < line.size() && line[i] == '"')
            quoted = !quoted;
        if (i == line.size() || (line[i] == ',' && !quoted)) {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline double parse_coordinate(const std::string& field, std::size_t line)
{
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw LocatedError(ErrorCode::ParseError, line, "line " + std::to_string(line) + ": bad number '" + field + "'");
    if (!std::isfinite(v))
        throw LocatedError(ErrorCode::NonFiniteCoordinate, line,
            "line " + std::to_string(line) + ": coordinate '" + field + "' is not finite");
    return v;
}

struct CsvColumns {
    std::size_t x = 0, y = 0;
    std::optional<std::size_t> series, time;
    std::size_t count = 0;
};

inline CsvColumns csv_header(const std::string& line)
{
    const auto names = split_csv(line);
    CsvColumns cols;
    cols.count = names.size();
    std::optional<std::size_t> x, y;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto name = lower(names[i]);
        if (name == "x")
            x = i;
        else if (name == "y")
            y = i;
        else if (name == "series")
            cols.series = i;
        else if (name == "time")
            cols.time = i;
    }
    if (!x || !y)
        throw LocatedError(ErrorCode::ParseError, 1, "line 1: CSV header must name columns x and y");
    cols.x = *x;
    cols.y = *y;
    return cols;
}

inline std::string json_label(const json& v)
{
    return v.is_string() ? v.get<std::string>() : v.dump();
}

inline Point2 json_position(const json& coords, std::size_t feature)
{
    if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number())
        throw LocatedError(ErrorCode::ParseError, feature, "feature " + std::to_string(feature) + ": bad coordinates");
    const Point2 p{coords[0].get<double>(), coords[1].get<double>()};
    if (!is_finite(p))
        throw LocatedError(ErrorCode::NonFiniteCoordinate, feature,
            "feature " + std::to_string(feature) + ": coordinate is not finite");
    return p;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw LocatedError(ErrorCode::ParseError, e.byte, std::string("invalid JSON: ") + e.what());
    }
}

} // namespace detail

/// CSV with a header naming x, y and optionally series and time. Line
/// numbers in errors are 1-based with the header on line 1.
inline SeriesTable parse_points_csv(std::istream& in)
{
    SeriesTable table;
    std::string line;
    std::size_t line_no = 0;
    std::optional<detail::CsvColumns> cols;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        if (!cols) {
            cols = detail::csv_header(line);
            if (line_no != 1)
                throw LocatedError(ErrorCode::ParseError, line_no, "header must be on line 1");
            continue;
        }
        const auto fields = detail::split_csv(line);
        if (fields.size() != cols->count)
            throw LocatedError(ErrorCode::ParseError, line_no,
                "line " + std::to_string(line_no) + ": expected " + std::to_string(cols->count) + " fields, got "
                    + std::to_string(fields.size()));
        SeriesRow row;
        row.x = detail::parse_coordinate(fields[cols->x], line_no);
        row.y = detail::parse_coordinate(fields[cols->y], line_no);
        if (cols->series && !fields[*cols->series].empty())
            row.series = fields[*cols->series];
        if (cols->time && !fields[*cols->time].empty())
            row.time = fields[*cols->time];
        table.rows.push_back(std::move(row));
    }
    if (!cols)
        throw LocatedError(ErrorCode::ParseError, 1, "empty CSV input");
    return table;
}

/// FeatureCollection of Point features; series/time come from properties.
/// Error locations are 0-based feature indices.
inline SeriesTable parse_points_geojson(const std::string& text)
{
    const json doc = detail::parse_json_text(text);
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features")
        || !doc.at("features").is_array())
        throw LocatedError(ErrorCode::ParseError, 0, "GeoJSON input must be a FeatureCollection");
    SeriesTable table;
    const auto& features = doc.at("features");
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        if (!f.is_object() || !f.contains("geometry") || !f.at("geometry").is_object()
            || f.at("geometry").value("type", "") != "Point")
            throw LocatedError(ErrorCode::ParseError, i, "feature " + std::to_string(i) + ": expected a Point geometry");
        SeriesRow row;
        const Point2 p = detail::json_position(f.at("geometry").value("coordinates", json()), i);
        row.x = p.x;
        row.y = p.y;
        if (f.contains("properties") && f.at("properties").is_object()) {
            const auto& props = f.at("properties");
            if (props.contains("series") && !props.at("series").is_null())
                row.series = detail::json_label(props.at("series"));
            if (props.contains("time") && !props.at("time").is_null())
                row.time = detail::json_label(props.at("time"));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline PointFormat format_for_path(const std::filesystem::path& path)
{
    const auto ext = detail::lower(path.extension().string());
    return (ext == ".geojson" || ext == ".json") ? PointFormat::GeoJson : PointFormat::Csv;
}

inline SeriesTable load_points(const std::filesystem::path& path, PointFormat format)
{
    if (format == PointFormat::GeoJson)
        return parse_points_geojson(detail::read_file(path));
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return parse_points_csv(in);
}

inline SeriesTable load_points(const std::filesystem::path& path) { return load_points(path, format_for_path(path)); }

/// Exterior ring of a GeoJSON Polygon (bare geometry, Feature, or first
/// feature of a FeatureCollection).
inline Outline parse_outline_geojson(const std::string& text)
{
    json geom = detail::parse_json_text(text);
    if (geom.is_object() && geom.value("type", "") == "FeatureCollection") {
        if (!geom.contains("features") || !geom.at("features").is_array() || geom.at("features").empty())
            throw LocatedError(ErrorCode::ParseError, 0, "outline FeatureCollection is empty");
        geom = geom.at("features")[0];
    }
    if (geom.is_object() && geom.value("type", "") == "Feature")
        geom = geom.value("geometry", json());
    if (!geom.is_object() || geom.value("type", "") != "Polygon" || !geom.contains("coordinates")
        || !geom.at("coordinates").is_array() || geom.at("coordinates").empty())
        throw LocatedError(ErrorCode::ParseError, 0, "outline must be a GeoJSON Polygon");
    std::vector<Point2> ring;
    for (const auto& pos : geom.at("coordinates")[0])
        ring.push_back(detail::json_position(pos, 0));
    return Outline::validated(std::move(ring));
}

inline Outline parse_outline_csv(std::istream& in)
{
    const auto table = parse_points_csv(in);
    std::vector<Point2> ring;
    ring.reserve(table.size());
    for (const auto& r : table.rows)
        ring.push_back({r.x, r.y});
    return Outline::validated(std::move(ring));
}

inline Outline load_outline(const std::filesystem::path& path)
{
    if (format_for_path(path) == PointFormat::GeoJson)
        return parse_outline_geojson(detail::read_file(path));
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return parse_outline_csv(in);
}

inline void write_points_csv(const SeriesTable& table, std::ostream& out)
{
    const bool has_series = std::any_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.series.has_value(); });
    const bool has_time = std::any_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.time.has_value(); });
    out << "x,y";
    if (has_series)
        out << ",series";
    if (has_time)
        out << ",time";
    out << '\n';
    char buf[64];
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.x, r.y);
        out << buf;
        if (has_series)
            out << ',' << r.series.value_or("");
        if (has_time)
            out << ',' << r.time.value_or("");
        out << '\n';
    }
}

enum class SynthKind { Uniform, Gaussian, Ring, Mixture };

inline SynthKind synth_kind_from_string(std::string_view s)
{
    if (s == "uniform")
        return SynthKind::Uniform;
    if (s == "gaussian")
        return SynthKind::Gaussian;
    if (s == "ring")
        return SynthKind::Ring;
    if (s == "mixture")
        return SynthKind::Mixture;
    throw Error(ErrorCode::InvalidConfig, "unknown synthetic kind '" + std::string(s) + "'");
}

struct SynthParams {
    /// Uniform samples fill this box.
    BoundingBox bounds{{0.0, 0.0}, {100.0, 100.0}};
    Point2 center{50.0, 50.0};
    double sigma = 12.0;
    double inner_radius = 30.0;
    double outer_radius = 40.0;
    std::vector<Point2> mixture_centers{{30.0, 35.0}, {70.0, 40.0}, {50.0, 75.0}};
    double mixture_sigma = 8.0;
    std::optional<std::string> series;
    std::optional<std::string> time;
};

/// Reproducible samples for a given seed (mt19937_64).
inline SeriesTable generate_synthetic(SynthKind kind, std::size_t count, std::uint64_t seed, const SynthParams& params = {})
{
    if (count < 1)
        throw Error(ErrorCode::InvalidConfig, "count must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SeriesTable table;
    table.rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Point2 p;
        switch (kind) {
        case SynthKind::Uniform:
            p = {params.bounds.min.x + unit(rng) * params.bounds.width(), params.bounds.min.y + unit(rng) * params.bounds.height()};
            break;
        case SynthKind::Gaussian: {
            const double gx = gauss(rng);
            const double gy = gauss(rng);
            p = params.center + params.sigma * Point2{gx, gy};
            break;
        }
        case SynthKind::Ring: {
            const double r1 = params.inner_radius, r2 = params.outer_radius;
            const double r = std::sqrt(r1 * r1 + unit(rng) * (r2 * r2 - r1 * r1));
            const double a = 2.0 * std::numbers::pi * unit(rng);
            p = params.center + r * Point2{std::cos(a), std::sin(a)};
            break;
        }
        case SynthKind::Mixture: {
            const auto which = static_cast<std::size_t>(unit(rng) * static_cast<double>(params.mixture_centers.size()));
            const Point2 c = params.mixture_centers[std::min(which, params.mixture_centers.size() - 1)];
            const double gx = gauss(rng);
            const double gy = gauss(rng);
            p = c + params.mixture_sigma * Point2{gx, gy};
            break;
        }
        }
        table.rows.push_back({p.x, p.y, params.series, params.time});
    }
    return table;
}

} // namespace phoenixmap

#endif
