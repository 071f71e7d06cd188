#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "treeca/errors.hpp"
#include "treeca/rule.hpp"
#include "treeca/tree.hpp"

namespace treeca {

/// Display colors per symbol value: 0, 1, 2 default to black, blue, red;
/// larger symbols get deterministic hue-stepped colors.
struct Palette {
    std::vector<std::string> colors;

    static Palette standard(std::uint32_t modulus) {
        static const std::array<const char*, 3> base = {"#000000", "#0000ff", "#ff0000"};
        Palette p;
        p.colors.reserve(modulus);
        for (std::uint32_t s = 0; s < modulus; ++s) {
            if (s < base.size()) {
                p.colors.emplace_back(base[s]);
            } else {
                p.colors.push_back(hue_color(s));
            }
        }
        return p;
    }

    static std::string hue_color(std::uint32_t symbol) {
        const double h = std::fmod(60.0 + 137.0 * (symbol - 3), 360.0);
        const double s = 0.78, v = 0.86;
        const double c = v * s;
        const double x = c * (1.0 - std::fabs(std::fmod(h / 60.0, 2.0) - 1.0));
        double r = 0, g = 0, b = 0;
        if (h < 60) { r = c; g = x; }
        else if (h < 120) { r = x; g = c; }
        else if (h < 180) { g = c; b = x; }
        else if (h < 240) { g = x; b = c; }
        else if (h < 300) { r = x; b = c; }
        else { r = c; b = x; }
        const double off = v - c;
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<unsigned>(std::lround((r + off) * 255.0)),
                      static_cast<unsigned>(std::lround((g + off) * 255.0)),
                      static_cast<unsigned>(std::lround((b + off) * 255.0)));
        return buf;
    }
};

struct RenderGeometry {
    double radius_step = 26.0;  // ring spacing per tree level
    double node_radius = 8.0;   // disk radius
};

namespace detail {

// Locale-independent fixed-point formatting keeps output byte-deterministic.
inline std::string fmt_coord(double v) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
    return std::string(buf.data(), res.ptr);
}

inline void append_frame(std::string& out, const Configuration& t, const Palette& palette,
                         const RenderGeometry& geo, double origin_x, double origin_y,
                         double center_offset) {
    const TreeShape& shape = t.shape();
    const auto sym = t.symbols();
    const double cx0 = origin_x + center_offset;
    const double cy0 = origin_y + center_offset;
    for (int level = 0; level < shape.height(); ++level) {
        const std::uint64_t offset = shape.level_offset(level);
        const std::uint64_t size = shape.level_size(level);
        const double radius = level * geo.radius_step;
        for (std::uint64_t q = 0; q < size; ++q) {
            const double angle =
                2.0 * std::numbers::pi * (static_cast<double>(q) + 0.5) / static_cast<double>(size);
            const double cx = cx0 + radius * std::cos(angle);
            const double cy = cy0 - radius * std::sin(angle);
            out += "<circle cx=\"" + fmt_coord(cx) + "\" cy=\"" + fmt_coord(cy) + "\" r=\"" +
                   fmt_coord(geo.node_radius) + "\" fill=\"" +
                   palette.colors[sym[offset + q]] + "\"/>\n";
        }
    }
}

inline double frame_extent(const TreeShape& shape, const RenderGeometry& geo) {
    return 2.0 * ((shape.height() - 1) * geo.radius_step + geo.node_radius + 4.0);
}

inline void require_palette(const Configuration& t, const Palette& palette) {
    if (palette.colors.size() < t.modulus()) {
        throw PaletteMismatch("palette has " + std::to_string(palette.colors.size()) +
                              " colors, configuration needs " + std::to_string(t.modulus()));
    }
}

inline std::string svg_document(double width, double height, const std::string& body) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_coord(width) +
           "\" height=\"" + fmt_coord(height) + "\" viewBox=\"0 0 " + fmt_coord(width) + " " +
           fmt_coord(height) + "\">\n" + body + "</svg>\n";
}

}  // namespace detail

/**
 * One configuration as concentric rings of disks: the root at the center,
 * the node at depth l, breadth position q at angle 2*pi*(q + 0.5) / d^l and
 * radius l * radius_step. Output is byte-deterministic for fixed inputs and
 * uses only svg/circle elements.
 */
inline std::string render_svg(const Configuration& t, const Palette& palette,
                              const RenderGeometry& geo = {}) {
    detail::require_palette(t, palette);
    const double extent = detail::frame_extent(t.shape(), geo);
    std::string body;
    detail::append_frame(body, t, palette, geo, 0.0, 0.0, extent / 2.0);
    return detail::svg_document(extent, extent, body);
}

/// A row of frames (e.g. successive steps of one orbit), left to right.
inline std::string render_strip(std::span<const Configuration> frames, const Palette& palette,
                                const RenderGeometry& geo = {}) {
    if (frames.empty()) throw Error("nothing to render");
    for (const Configuration& t : frames) {
        detail::require_palette(t, palette);
        if (!(t.shape() == frames.front().shape()) || t.modulus() != frames.front().modulus()) {
            throw ShapeMismatch("strip frames must share shape and modulus");
        }
    }
    const double extent = detail::frame_extent(frames.front().shape(), geo);
    std::string body;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        detail::append_frame(body, frames[i], palette, geo, extent * static_cast<double>(i), 0.0,
                             extent / 2.0);
    }
    return detail::svg_document(extent * static_cast<double>(frames.size()), extent, body);
}

}  // namespace treeca
