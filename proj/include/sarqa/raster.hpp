#ifndef SARQA_RASTER_HPP
#define SARQA_RASTER_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sarqa/errors.hpp"

namespace sarqa {

/// Row-major grid of 64-bit reals. Intensity-role rasters hold finite,
/// non-negative values; operations that require that validate it themselves.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Raster() = default;
    Raster(int w, int h, double fill = 0.0);

    double& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }

    size_t size() const { return data.size(); }
    bool same_shape(const Raster& other) const {
        return width == other.width && height == other.height;
    }
};

/// Rectangular region of interest; must lie fully inside its host raster.
struct Roi {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    bool valid_in(const Raster& r) const {
        return w > 0 && h > 0 && x0 >= 0 && y0 >= 0 && x0 + w <= r.width &&
               y0 + h <= r.height;
    }
    long area() const { return static_cast<long>(w) * h; }
    bool overlaps(const Roi& other) const {
        return x0 < other.x0 + other.w && other.x0 < x0 + w &&
               y0 < other.y0 + other.h && other.y0 < y0 + h;
    }
};

/// First-order summary of a pixel set. std uses the N-1 divisor; enl is
/// mean^2/variance, +infinity when the variance is exactly zero.
struct SummaryStats {
    double mean = 0.0;
    double std = 0.0;
    double enl = 0.0;
};

SummaryStats stats_of(const double* values, size_t count);

/// RAS1 container: one JSON header line {"magic":"RAS1","width":W,"height":H,
/// "dtype":"f64le"} + '\n', then W*H little-endian doubles, row-major.
Raster load_raster(const std::filesystem::path& path);
void save_raster(const Raster& r, const std::filesystem::path& path);

/// 8-bit grayscale PNG preview. Values are clipped at the given percentiles
/// and mapped linearly to 0..255; a degenerate (constant) raster renders as
/// mid-gray 128.
void export_png8(const Raster& r, const std::filesystem::path& path,
                 double clip_low_pct = 1.0, double clip_high_pct = 99.0);

/// Elementwise square, for amplitude-format inputs. Rejects negative values.
Raster square_amplitude(const Raster& r);

/// Mean / sample std / ENL over a region; area must be at least 2.
SummaryStats roi_stats(const Raster& r, const Roi& roi);

} // namespace sarqa

#endif
