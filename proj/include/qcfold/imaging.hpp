#pragma once

// Image output: escape-time rasters as PNG and construction diagrams as
// SVG.
//
// The PNG encoder is self-contained on top of zlib, pinned to one
// compression level and the null scanline filter, so the same raster
// always produces byte-identical files -- renders are comparable with a
// plain checksum.  Provenance (tool version, configuration hash, model
// name) rides along in tEXt chunks.
//
// The SVG side draws what the numbers alone make hard to see: the fold
// cells tiling each band in strip coordinates, and the z-plane overview
// with tract walls, the unit circle, and the selected zero net.

#include "qcfold/dynamics.hpp"
#include "qcfold/model.hpp"
#include "qcfold/numeric.hpp"
#include "qcfold/quasiregular.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qcfold {

// 8-bit RGB raster, row major, top row first.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h)
        : width(w), height(h),
          rgb(static_cast<std::size_t>(w) * h * 3, 0) {
        if (w < 1 || h < 1) throw ConfigError("Image: empty raster");
    }

    void put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const std::size_t i =
            3 * (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x));
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
};

namespace detail {

inline void png_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

inline void png_chunk(std::string& out, const char type[4],
                      const std::string& data) {
    png_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.append(type, 4);
    out.append(data);
    const auto* p = reinterpret_cast<const Bytef*>(out.data() + start);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0ul, p, static_cast<uInt>(out.size() - start)));
    png_be32(out, crc);
}

} // namespace detail

/// Encode an image as a PNG byte string.  Text pairs become tEXt chunks;
/// keywords must be 1..79 printable characters.  Encoding is deterministic.
inline std::string png_encode(
    const Image& img,
    const std::vector<std::pair<std::string, std::string>>& texts = {}) {
    if (img.width < 1 || img.height < 1)
        throw ConfigError("png_encode: empty image");
    if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3)
        throw ConfigError("png_encode: pixel buffer size mismatch");

    std::string out;
    const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.append(reinterpret_cast<const char*>(sig), 8);

    std::string ihdr;
    detail::png_be32(ihdr, static_cast<std::uint32_t>(img.width));
    detail::png_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // colour type: truecolour
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    detail::png_chunk(out, "IHDR", ihdr);

    for (const auto& [key, text] : texts) {
        if (key.empty() || key.size() > 79 ||
            key.find('\0') != std::string::npos)
            throw ConfigError("png_encode: bad tEXt keyword");
        std::string data = key;
        data.push_back('\0');
        data.append(text);
        detail::png_chunk(out, "tEXt", data);
    }

    // Null filter on every scanline, then one zlib stream at a fixed level;
    // both choices are part of the format contract for reproducibility.
    std::string raw;
    raw.reserve(static_cast<std::size_t>(img.height) *
                (static_cast<std::size_t>(img.width) * 3 + 1));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back('\0');
        const std::size_t off = 3 * static_cast<std::size_t>(y) * img.width;
        raw.append(reinterpret_cast<const char*>(img.rgb.data() + off),
                   static_cast<std::size_t>(img.width) * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string idat(bound, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(idat.data()), &bound,
                             reinterpret_cast<const Bytef*>(raw.data()),
                             static_cast<uLong>(raw.size()), 9);
    if (rc != Z_OK) throw NumericalError("png_encode: deflate failed");
    idat.resize(bound);
    detail::png_chunk(out, "IDAT", idat);
    detail::png_chunk(out, "IEND", "");
    return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("short write to " + path);
}

/// Colour an escape count: the longer an orbit stays inside the tracts,
/// the hotter the pixel; orbits that never leave are near-black.
inline void escape_color(int count, int max_steps, std::uint8_t& r,
                         std::uint8_t& g, std::uint8_t& b) {
    if (count >= max_steps) {
        r = 12;
        g = 12;
        b = 28;
        return;
    }
    const double t = static_cast<double>(count) / max_steps;
    r = static_cast<std::uint8_t>(255.0 * std::pow(t, 0.45));
    g = static_cast<std::uint8_t>(255.0 * std::pow(t, 0.85));
    b = static_cast<std::uint8_t>(64.0 + 191.0 * t);
}

/// Escape-time raster of the model over a box (see julia_grid for the
/// counting rule).  Row 0 of the image is the top of the box.
inline Image render_escape(const Model& m, double x0, double x1, double y0,
                           double y1, int nx, int ny, int max_steps) {
    const std::vector<int> counts =
        julia_grid(m, x0, x1, y0, y1, nx, ny, max_steps);
    Image img(nx, ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            std::uint8_t r, g, b;
            escape_color(counts[static_cast<std::size_t>(iy) * nx + ix],
                         max_steps, r, g, b);
            img.put(ix, ny - 1 - iy, r, g, b);
        }
    }
    return img;
}

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

} // namespace detail

/// Diagram of one band in strip coordinates: the fold cells as filled
/// triangles (surplus-block cells shaded), slot boundaries, and the wall.
/// The vertical axis is flipped so increasing ordinate points up.
inline std::string svg_fold_cells(const TractInterpolation& ti) {
    using detail::svg_num;
    const double lo = ti.wall_lo(), hi = ti.wall_hi();
    const double pad = 0.08;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << svg_num(1.0 - pad) << " " << svg_num(-hi - pad) << " "
      << svg_num(1.0 + 2 * pad) << " " << svg_num(hi - lo + 2 * pad)
      << "\" preserveAspectRatio=\"xMidYMid meet\">\n";
    s << "<g stroke=\"#555\" stroke-width=\"0.004\">\n";
    for (std::size_t slot = 0; slot + 1 < ti.slot_bounds.size(); ++slot) {
        const auto [c0, c1] = ti.slot_cells[slot];
        for (std::size_t i = c0; i < c1; ++i) {
            const AffineCell& c = ti.fold.cells[i];
            const char* fill = c.slit_role == 1   ? "#f4c7a1"
                               : c.slit_role == 2 ? "#a1c7f4"
                                                  : "#e8e8e8";
            s << "<polygon fill=\"" << fill << "\" points=\"";
            for (int k = 0; k < 3; ++k) {
                s << svg_num(c.src[static_cast<std::size_t>(k)].real()) << ","
                  << svg_num(-c.src[static_cast<std::size_t>(k)].imag());
                if (k < 2) s << " ";
            }
            s << "\"/>\n";
        }
    }
    s << "</g>\n<g stroke=\"#003366\" stroke-width=\"0.012\" fill=\"none\">\n";
    for (double b : ti.slot_bounds)
        s << "<line x1=\"1\" y1=\"" << svg_num(-b) << "\" x2=\"2\" y2=\""
          << svg_num(-b) << "\"/>\n";
    s << "<line x1=\"1\" y1=\"" << svg_num(-lo) << "\" x2=\"1\" y2=\""
      << svg_num(-hi) << "\"/>\n";
    s << "<line x1=\"2\" y1=\"" << svg_num(-lo) << "\" x2=\"2\" y2=\""
      << svg_num(-hi) << "\"/>\n";
    s << "</g>\n</svg>\n";
    return s.str();
}

/// z-plane overview: the level-1 and level-2 curves of every tract, the
/// unit circle, and the zero net (pulled back to the plane).  The view
/// box adapts to the model but always contains the unit disk.
inline std::string svg_overview(const GlobalMap& g) {
    using detail::svg_num;
    const double y_reach = 10.0;
    double x_min = -2.0, x_max = 2.0;

    std::ostringstream body;
    body << "<g fill=\"none\" stroke-width=\"0.05\">\n";
    for (std::size_t j = 0; j < g.model.tracts.size(); ++j) {
        for (double level : {1.0, 2.0}) {
            body << "<polyline stroke=\""
                 << (level == 1.0 ? "#aa3311" : "#3366aa") << "\" points=\"";
            const int n = 256;
            for (int k = 0; k <= n; ++k) {
                const double y = -y_reach + 2.0 * y_reach * k / n;
                const cplx z = g.model.tracts[j].tau_inv(cplx{level, y});
                x_min = std::min(x_min, z.real());
                x_max = std::max(x_max, z.real());
                body << svg_num(z.real()) << "," << svg_num(-z.imag());
                if (k < n) body << " ";
            }
            body << "\"/>\n";
        }
    }
    body << "<circle cx=\"0\" cy=\"0\" r=\"1\" stroke=\"#444\" "
            "stroke-width=\"0.03\"/>\n";
    body << "</g>\n<g fill=\"#117722\" stroke=\"none\">\n";
    for (cplx a : g.product.zeros)
        body << "<circle cx=\"" << svg_num(a.real()) << "\" cy=\""
             << svg_num(-a.imag()) << "\" r=\"0.05\"/>\n";
    body << "</g>\n";

    const double pad = 1.0;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << svg_num(x_min - pad) << " " << svg_num(-y_reach - pad) << " "
      << svg_num(x_max - x_min + 2 * pad) << " " << svg_num(2 * y_reach + 2 * pad)
      << "\" preserveAspectRatio=\"xMidYMid meet\">\n"
      << body.str() << "</svg>\n";
    return s.str();
}

} // namespace qcfold
