// phoenixmap: render Phoenixmaps from point files, or generate synthetic points.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"

#include "phoenixmap/phoenixmap.hpp"

namespace {

bool use_color()
{
    const char* v = std::getenv("PHOENIXMAP_NO_COLOR");
    return v == nullptr && isatty(fileno(stderr));
}

void log(const char* level, const char* ansi, const std::string& msg)
{
    if (use_color())
        std::cerr << ansi << level << "\033[0m: " << msg << '\n';
    else
        std::cerr << level << ": " << msg << '\n';
}

void warn(const std::string& msg) { log("warning", "\033[33m", msg); }
void fail(const std::string& msg) { log("error", "\033[31m", msg); }
void info(const std::string& msg) { log("info", "\033[36m", msg); }

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw phoenixmap::Error(phoenixmap::ErrorCode::Io, "cannot write '" + path + "'");
    out << text;
    if (!out)
        throw phoenixmap::Error(phoenixmap::ErrorCode::Io, "failed writing '" + path + "'");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace phoenixmap;

    CLI::App app{"Phoenixmap: outline-based density maps"};
    app.require_subcommand(1);

    Config config;
    std::optional<std::size_t> window;
    std::optional<double> scale, offset, heat_bandwidth;
    std::string hull_mode = "concave";
    std::string config_path;
    std::string layers;
    auto* render = app.add_subcommand("render", "draw Phoenixmaps for every (series, time) group");
    render->add_option("--input", config.input_path, "points file (.csv with x,y[,series,time] or .geojson)")->required();
    render->add_option("--outline", config.outline_path, "predefined outline (.geojson Polygon or .csv ring)");
    render->add_option("--config", config_path, "JSON config or sidecar to start from");
    render->add_option("--segments", config.segments, "number of curve segments n");
    render->add_option("--window", window, "smoothing half-window x (default n/10)");
    auto* scale_opt = render->add_option("--scale", scale, "width scale c");
    render->add_option("--max-width", config.max_width, "widest band in render units when --scale is absent")->excludes(scale_opt);
    render->add_option("--k", config.hull_k, "neighbour count for the concave hull");
    render->add_option("--hull", hull_mode, "outline mode: concave, convex or predefined");
    render->add_option("--offset", offset, "outline offset b (default 2% of the bounding-box diagonal)");
    render->add_option("--palette", config.palette, "qual6, dark2, set1 or paired");
    render->add_option("--legend-bins", config.legend_bins, "radial legend bins m");
    render->add_option("--legend-bars", config.legend_bars, "width reference bars per legend");
    render->add_option("--width", config.canvas_width, "canvas width");
    render->add_option("--height", config.canvas_height, "canvas height");
    render->add_option("--heat-bandwidth", heat_bandwidth, "add a kernel density layer with this bandwidth");
    render->add_option("--background", config.background, "underlay image reference");
    render->add_option("--layers", layers, "comma-separated layer order, e.g. heat,bands,dots,legend");
    render->add_flag("--dots", config.dots, "draw the observations as dots");
    render->add_option("--out", config.out_path, "SVG output path")->required();
    render->add_option("--sidecar", config.sidecar_path, "JSON sidecar output path");

    std::string kind = "gaussian";
    std::size_t count = 1000;
    std::uint64_t seed = 42;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "write a synthetic point set");
    synth->add_option("--kind", kind, "uniform, gaussian, ring or mixture")
        ->check(CLI::IsMember({"uniform", "gaussian", "ring", "mixture"}));
    synth->add_option("--count", count, "number of points")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--out", synth_out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) {
            const auto table = generate_synthetic(synth_kind_from_string(kind), count, seed);
            std::ofstream out(synth_out);
            if (!out)
                throw Error(ErrorCode::Io, "cannot write '" + synth_out + "'");
            write_points_csv(table, out);
            info("wrote " + std::to_string(table.size()) + " points to " + synth_out);
            return 0;
        }

        if (!config_path.empty()) {
            // Command-line values win over the file for the options given explicitly.
            Config base = config_from_json(detail::parse_json_text(detail::read_file(config_path)));
            for (auto* opt : render->get_options()) {
                if (opt->count() == 0)
                    continue;
                const std::string name = opt->get_name();
                if (name == "--input") base.input_path = config.input_path;
                else if (name == "--outline") base.outline_path = config.outline_path;
                else if (name == "--segments") base.segments = config.segments;
                else if (name == "--max-width") base.max_width = config.max_width;
                else if (name == "--k") base.hull_k = config.hull_k;
                else if (name == "--palette") base.palette = config.palette;
                else if (name == "--legend-bins") base.legend_bins = config.legend_bins;
                else if (name == "--legend-bars") base.legend_bars = config.legend_bars;
                else if (name == "--width") base.canvas_width = config.canvas_width;
                else if (name == "--height") base.canvas_height = config.canvas_height;
                else if (name == "--background") base.background = config.background;
                else if (name == "--dots") base.dots = config.dots;
                else if (name == "--out") base.out_path = config.out_path;
                else if (name == "--sidecar") base.sidecar_path = config.sidecar_path;
            }
            if (render->count("--hull") == 0)
                hull_mode = std::string(to_string(base.hull_mode));
            if (!window && render->count("--segments") == 0) window = base.window;
            if (!scale && render->count("--max-width") == 0) scale = base.scale;
            if (!offset) offset = base.offset;
            if (!heat_bandwidth) heat_bandwidth = base.heat_bandwidth;
            if (layers.empty()) {
                for (Layer l : base.layers)
                    layers += (layers.empty() ? "" : ",") + std::string(to_string(l));
            }
            config = std::move(base);
        }
        config.window = window;
        config.scale = scale;
        config.offset = offset;
        config.heat_bandwidth = heat_bandwidth;
        config.hull_mode = hull_mode_from_string(hull_mode);
        if (!config.outline_path.empty() && render->count("--hull") == 0)
            config.hull_mode = HullMode::Predefined;
        if (!layers.empty()) {
            config.layers.clear();
            std::size_t start = 0;
            while (start <= layers.size()) {
                const auto end = std::min(layers.find(',', start), layers.size());
                const auto name = layers.substr(start, end - start);
                const auto layer = layer_from_string(name);
                if (!layer)
                    throw Error(ErrorCode::InvalidConfig, "unknown layer '" + name + "'");
                config.layers.push_back(*layer);
                start = end + 1;
            }
        }
        config.validate();

        const SeriesTable table = load_points(config.input_path);
        std::optional<Outline> outline;
        if (config.hull_mode == HullMode::Predefined) {
            if (config.outline_path.empty())
                throw Error(ErrorCode::InvalidConfig, "--hull predefined needs --outline");
            outline = load_outline(config.outline_path);
        }

        const PipelineResult result = run_pipeline(table, config, outline);
        for (const auto& w : result.warnings)
            warn(w);
        write_text(config.out_path, result.svg);
        if (!config.sidecar_path.empty())
            write_text(config.sidecar_path, result.sidecar.dump(1) + "\n");
        info("drew " + std::to_string(result.groups.size()) + " band(s) to " + config.out_path);
        return 0;
    } catch (const Error& e) {
        fail(e.what());
        return is_input_error(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        fail(e.what());
        return 1;
    }
}
