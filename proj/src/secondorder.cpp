#include "sarqa/secondorder.hpp"

#include <algorithm>
#include <cmath>

#include "sarqa/numeric.hpp"
#include "sarqa/parallel.hpp"
#include "sarqa/rng.hpp"

namespace sarqa {

QuantRaster quantize8(const Raster& r, double clip_low_pct, double clip_high_pct) {
    if (r.size() == 0) throw ValidationError("quantize8: empty raster");
    for (double v : r.data)
        if (!std::isfinite(v)) throw ValidationError("quantize8: non-finite value");
    const double lo = percentile_nearest_rank(r.data, clip_low_pct);
    const double hi = percentile_nearest_rank(r.data, clip_high_pct);

    QuantRaster q;
    q.width = r.width;
    q.height = r.height;
    q.levels.resize(r.size());
    if (hi <= lo) {
        std::fill(q.levels.begin(), q.levels.end(), uint8_t{0});
        return q;
    }
    const double scale = 8.0 / (hi - lo);
    for (size_t i = 0; i < r.size(); ++i) {
        const double v = std::clamp(r.data[i], lo, hi);
        int level = static_cast<int>((v - lo) * scale);
        if (level > 7) level = 7;
        q.levels[i] = static_cast<uint8_t>(level);
    }
    return q;
}

Glcm glcm(const QuantRaster& q, const Roi& roi, const Offset& offset) {
    if (offset.dx == 0 && offset.dy == 0)
        throw ValidationError("glcm: offset must be nonzero");
    if (roi.w <= 0 || roi.h <= 0 || roi.x0 < 0 || roi.y0 < 0 ||
        roi.x0 + roi.w > q.width || roi.y0 + roi.h > q.height)
        throw ValidationError("glcm: roi outside raster");
    if (roi.w <= std::abs(offset.dx) || roi.h <= std::abs(offset.dy))
        throw ValidationError("glcm: roi smaller than the offset span");

    Glcm g;
    g.offset = offset;
    for (int y = roi.y0; y < roi.y0 + roi.h; ++y) {
        const int y2 = y + offset.dy;
        if (y2 < roi.y0 || y2 >= roi.y0 + roi.h) continue;
        for (int x = roi.x0; x < roi.x0 + roi.w; ++x) {
            const int x2 = x + offset.dx;
            if (x2 < roi.x0 || x2 >= roi.x0 + roi.w) continue;
            const uint8_t a = q.at(y, x);
            const uint8_t b = q.at(y2, x2);
            g.counts[a][b] += 1;
            g.counts[b][a] += 1; // symmetric counting
            g.total += 2;
        }
    }
    return g;
}

double homogeneity(const Glcm& g) {
    if (g.total == 0) throw ValidationError("homogeneity: empty GLCM");
    const double k = static_cast<double>(g.total);
    double h = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (g.counts[i][j] == 0) continue;
            const double p = static_cast<double>(g.counts[i][j]) / k;
            h += p / (1.0 + static_cast<double>((i - j) * (i - j)));
        }
    return h;
}

double mean_homogeneity(const QuantRaster& q, int win,
                        const std::vector<Offset>& offsets) {
    if (win < 2) throw ValidationError("mean_homogeneity: window must be >= 2");
    if (offsets.empty()) throw ValidationError("mean_homogeneity: no offsets");
    const int tiles_y = q.height / win;
    const int tiles_x = q.width / win;
    if (tiles_y == 0 || tiles_x == 0)
        throw ValidationError("mean_homogeneity: no full window fits");

    std::vector<double> values;
    values.reserve(static_cast<size_t>(tiles_y) * tiles_x * offsets.size());
    for (int ty = 0; ty < tiles_y; ++ty)
        for (int tx = 0; tx < tiles_x; ++tx)
            for (const Offset& off : offsets) {
                const Roi tile{tx * win, ty * win, win, win};
                values.push_back(homogeneity(glcm(q, tile, off)));
            }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

Raster shuffle(const Raster& r, uint64_t seed) {
    Raster out = r;
    Rng gen(seed);
    for (size_t i = out.size(); i > 1; --i) {
        const size_t j = gen.uniform_below(i);
        std::swap(out.data[i - 1], out.data[j]);
    }
    return out;
}

namespace {

/// Permutes the quantized levels in place; identical in law to quantizing a
/// shuffled raster, since quantization is a per-pixel map.
void shuffle_levels(std::vector<uint8_t>& levels, uint64_t seed) {
    Rng gen(seed);
    for (size_t i = levels.size(); i > 1; --i) {
        const size_t j = gen.uniform_below(i);
        std::swap(levels[i - 1], levels[j]);
    }
}

} // namespace

nlohmann::json SecondOrderReport::to_json() const {
    return {{"h_o", h_o},
            {"h_g_bar", h_g_bar},
            {"delta_h", delta_h},
            {"p", p},
            {"seed", seed},
            {"h_g_samples", h_g_samples}};
}

SecondOrderReport delta_h(const Raster& ratio, int p, int win,
                          const std::vector<Offset>& offsets, uint64_t seed,
                          double clip_low_pct, double clip_high_pct) {
    if (p < 1) throw ValidationError("delta_h: p must be >= 1");
    const QuantRaster q = quantize8(ratio, clip_low_pct, clip_high_pct);

    SecondOrderReport rep;
    rep.p = p;
    rep.seed = seed;
    rep.h_o = mean_homogeneity(q, win, offsets);
    rep.h_g_samples.assign(static_cast<size_t>(p), 0.0);
    parallel_for(0, p, [&](long k) {
        QuantRaster shuffled = q;
        shuffle_levels(shuffled.levels, derive_seed(seed, static_cast<uint64_t>(k)));
        rep.h_g_samples[static_cast<size_t>(k)] = mean_homogeneity(shuffled, win, offsets);
    });
    rep.h_g_bar = pairwise_sum(rep.h_g_samples) / static_cast<double>(p);
    rep.delta_h = 100.0 * std::abs(rep.h_o - rep.h_g_bar) / rep.h_o;
    return rep;
}

} // namespace sarqa
