#ifndef PHOENIXMAP_COLOR_HPP
#define PHOENIXMAP_COLOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "phoenixmap/error.hpp"

namespace phoenixmap {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(Rgb, Rgb) = default;
};

inline Rgb parse_hex_color(std::string_view hex)
{
    if (hex.size() == 7 && hex[0] == '#') {
        auto nibble = [&](char c) -> int {
            if (c >= '0' && c <= '9')
                return c - '0';
            if (c >= 'a' && c <= 'f')
                return c - 'a' + 10;
            if (c >= 'A' && c <= 'F')
                return c - 'A' + 10;
            return -1;
        };
        std::array<int, 6> v{};
        bool ok = true;
        for (std::size_t i = 0; i < 6; ++i)
            ok = ok && (v[i] = nibble(hex[i + 1])) >= 0;
        if (ok)
            return {static_cast<std::uint8_t>(v[0] * 16 + v[1]), static_cast<std::uint8_t>(v[2] * 16 + v[3]),
                static_cast<std::uint8_t>(v[4] * 16 + v[5])};
    }
    throw Error(ErrorCode::InvalidConfig, "expected a #rrggbb color, got '" + std::string(hex) + "'");
}

inline std::string to_hex(Rgb c)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

namespace detail {

struct Lab {
    double l, a, b;
};

inline double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }
inline double linear_to_srgb(double c) { return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055; }

// D65 white point.
inline constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;

inline Lab to_lab(Rgb c)
{
    const double r = srgb_to_linear(c.r / 255.0), g = srgb_to_linear(c.g / 255.0), b = srgb_to_linear(c.b / 255.0);
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / xn;
    const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / yn;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / zn;
    auto f = [](double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; };
    const double fx = f(x), fy = f(y), fz = f(z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline Rgb from_lab(Lab lab)
{
    const double fy = (lab.l + 16.0) / 116.0;
    const double fx = fy + lab.a / 500.0;
    const double fz = fy - lab.b / 200.0;
    auto finv = [](double t) { return t * t * t > 216.0 / 24389.0 ? t * t * t : (116.0 * t - 16.0) * 27.0 / 24389.0; };
    const double x = finv(fx) * xn, y = finv(fy) * yn, z = finv(fz) * zn;
    const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    auto to8 = [](double v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(linear_to_srgb(std::clamp(v, 0.0, 1.0)), 0.0, 1.0) * 255.0));
    };
    return {to8(r), to8(g), to8(b)};
}

} // namespace detail

/// Interpolation in CIELAB; t = 0 and t = 1 return the endpoints exactly.
inline Rgb mix_perceptual(Rgb from, Rgb to, double t)
{
    if (t <= 0.0)
        return from;
    if (t >= 1.0)
        return to;
    const auto a = detail::to_lab(from), b = detail::to_lab(to);
    return detail::from_lab({a.l + t * (b.l - a.l), a.a + t * (b.a - a.a), a.b + t * (b.b - a.b)});
}

/// Qualitative 6-class palettes from ColorBrewer.
inline std::vector<std::string> named_palette(std::string_view name)
{
    if (name == "qual6" || name == "dark2")
        return {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};
    if (name == "set1")
        return {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"};
    if (name == "paired")
        return {"#1f78b4", "#33a02c", "#e31a1c", "#ff7f00", "#6a3d9a", "#b15928"};
    throw Error(ErrorCode::InvalidConfig, "unknown palette '" + std::string(name) + "'");
}

/// Default time-gradient endpoints: dark brown to red.
inline constexpr std::string_view default_time_start = "#4d2600";
inline constexpr std::string_view default_time_end = "#e31a1c";

} // namespace phoenixmap

#endif
