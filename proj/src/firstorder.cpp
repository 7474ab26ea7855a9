#include "sarqa/firstorder.hpp"

#include <cmath>
#include <limits>

#include "sarqa/parallel.hpp"

namespace sarqa {

SelectionMode selection_mode_from_string(const std::string& name) {
    if (name == "noisy") return SelectionMode::noisy;
    if (name == "paper") return SelectionMode::paper;
    throw ValidationError("unknown selection mode: " + name);
}

std::string to_string(SelectionMode mode) {
    return mode == SelectionMode::noisy ? "noisy" : "paper";
}

namespace {

inline int mirror(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

/// Two-pass window stats. The two-pass form keeps the variance exactly zero
/// on constant windows, which the infinity-sentinel logic depends on.
SummaryStats window_stats(const Raster& r, int x0, int y0, int w, int h) {
    const double n = static_cast<double>(w) * h;
    double sum = 0.0;
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) sum += r.at(y, x);
    const double mean = sum / n;
    double ss = 0.0;
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) {
            const double d = r.at(y, x) - mean;
            ss += d * d;
        }
    const double var = ss / (n - 1.0);
    SummaryStats s;
    s.mean = mean;
    s.std = std::sqrt(var);
    s.enl = var == 0.0 ? std::numeric_limits<double>::infinity() : mean * mean / var;
    return s;
}

} // namespace

LocalStatsField local_stats(const Raster& r, int window) {
    if (window < 3 || window % 2 == 0)
        throw ValidationError("local_stats: window must be odd and >= 3");
    if (window >= std::min(r.width, r.height))
        throw ValidationError("local_stats: window exceeds raster dimensions");
    const int half = window / 2;
    LocalStatsField f;
    f.window = window;
    f.mean = Raster(r.width, r.height);
    f.std = Raster(r.width, r.height);
    f.enl = Raster(r.width, r.height);
    parallel_for(0, r.height, [&](long yy) {
        const int y = static_cast<int>(yy);
        std::vector<double> buf(static_cast<size_t>(window) * window);
        for (int x = 0; x < r.width; ++x) {
            size_t k = 0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    buf[k++] = r.at(mirror(y + dy, r.height), mirror(x + dx, r.width));
            double sum = 0.0;
            for (double v : buf) sum += v;
            const double mean = sum / static_cast<double>(buf.size());
            double ss = 0.0;
            for (double v : buf) {
                const double d = v - mean;
                ss += d * d;
            }
            const double var = ss / static_cast<double>(buf.size() - 1);
            f.mean.at(y, x) = mean;
            f.std.at(y, x) = std::sqrt(var);
            f.enl.at(y, x) = var == 0.0 ? std::numeric_limits<double>::infinity()
                                        : mean * mean / var;
        }
    });
    return f;
}

nlohmann::json AreaSelection::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const SelectedWindow& w : windows)
        arr.push_back({{"x0", w.roi.x0},
                       {"y0", w.roi.y0},
                       {"w", w.roi.w},
                       {"h", w.roi.h},
                       {"enl_noisy", w.enl_noisy},
                       {"enl_ratio", w.enl_ratio},
                       {"mu_ratio", w.mu_ratio}});
    return {{"n", n()},
            {"window", window},
            {"tol", tol},
            {"mode", to_string(mode)},
            {"windows", arr}};
}

AreaSelection select_areas(const Raster& z, const Raster& ratio,
                           const SelectionConfig& cfg) {
    if (!z.same_shape(ratio))
        throw ValidationError("select_areas: dimension mismatch");
    const int w = cfg.window;
    if (w < 3 || w % 2 == 0)
        throw ValidationError("select_areas: window must be odd and >= 3");
    if (z.width < w || z.height < w)
        throw ValidationError("select_areas: raster smaller than the window");
    if (cfg.mode == SelectionMode::noisy && !(cfg.looks > 0.0))
        throw ValidationError("select_areas: nominal looks must be > 0 in noisy mode");

    AreaSelection sel;
    sel.window = w;
    sel.tol = cfg.tol;
    sel.mode = cfg.mode;

    const int stride = std::max(1, w / 2);
    for (int y0 = 0; y0 + w <= z.height; y0 += stride) {
        for (int x0 = 0; x0 + w <= z.width; x0 += stride) {
            const Roi roi{x0, y0, w, w};
            bool overlaps = false;
            for (const SelectedWindow& acc : sel.windows)
                if (roi.overlaps(acc.roi)) { overlaps = true; break; }
            if (overlaps) continue;

            const SummaryStats sz = window_stats(z, x0, y0, w, w);
            const SummaryStats sr = window_stats(ratio, x0, y0, w, w);
            if (!std::isfinite(sz.enl) || !std::isfinite(sr.enl)) continue;
            if (sz.enl <= 0.0) continue;

            bool accept = false;
            if (cfg.mode == SelectionMode::paper) {
                accept = std::abs(sr.enl - sz.enl) / sz.enl <= cfg.tol &&
                         std::abs(sr.mean - 1.0) <= cfg.tol;
            } else {
                accept = std::abs(sz.enl - cfg.looks) / cfg.looks <= cfg.tol_detect;
            }
            if (!accept) continue;

            sel.windows.push_back(SelectedWindow{roi, sz.enl, sr.enl, sr.mean});
        }
    }

    if (sel.windows.empty())
        throw NoTexturelessArea("no textureless area found; the measure is undefined "
                                "without at least one textureless window");
    return sel;
}

double first_order_residual(const AreaSelection& sel) {
    if (sel.windows.empty())
        throw ValidationError("first_order_residual: no selected windows");
    double sum = 0.0;
    for (const SelectedWindow& w : sel.windows) {
        if (!std::isfinite(w.enl_noisy) || w.enl_noisy <= 0.0)
            throw ValidationError("first_order_residual: window with non-finite or "
                                  "non-positive noisy ENL");
        sum += std::abs(w.enl_noisy - w.enl_ratio) / w.enl_noisy +
               std::abs(1.0 - w.mu_ratio);
    }
    return 0.5 * sum;
}

} // namespace sarqa
