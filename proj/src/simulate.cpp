#include "sarqa/simulate.hpp"

#include <cmath>
#include <utility>

#include "sarqa/parallel.hpp"
#include "sarqa/rng.hpp"

namespace sarqa {

PhantomKind phantom_kind_from_string(const std::string& name) {
    if (name == "blocks" || name == "blocks_points") return PhantomKind::blocks_points;
    if (name == "strips") return PhantomKind::strips;
    if (name == "step") return PhantomKind::step;
    if (name == "textured_step") return PhantomKind::textured_step;
    if (name == "sine") return PhantomKind::sine;
    throw ValidationError("unknown phantom kind: " + name);
}

std::string to_string(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::blocks_points: return "blocks_points";
        case PhantomKind::strips: return "strips";
        case PhantomKind::step: return "step";
        case PhantomKind::textured_step: return "textured_step";
        case PhantomKind::sine: return "sine";
    }
    return "?";
}

BlocksLayout blocks_points_layout(int side) {
    if (side < 100)
        throw ValidationError("blocks phantom: side must be >= 100 to host all features");
    BlocksLayout lay;
    lay.side = side;

    const int sq = side / 5;
    const int q1 = side / 4;
    const int q3 = 3 * side / 4;
    auto square_at = [&](int cx, int cy) {
        return Roi{cx - sq / 2, cy - sq / 2, sq, sq};
    };
    lay.squares = {square_at(q1, q1), square_at(q3, q1), square_at(q1, q3),
                   square_at(q3, q3)};
    lay.square_values = {2.0, 40.0, 60.0, 80.0};

    // Two lines of twenty scatterers cross between the squares: 4x4 targets
    // along the horizontal mid-line, 4(tall)x2(wide) along the vertical one.
    const int mid = side / 2;
    const double pitch = side / 20.0;
    for (int k = 0; k < 20; ++k) {
        const int c = static_cast<int>(std::lround((k + 0.5) * pitch));
        lay.scatterers.push_back(Roi{c - 2, mid - 2, 4, 4});        // horizontal row
        lay.scatterers.push_back(Roi{mid - 1, c - 2, 2, 4});        // vertical column
    }
    for (const Roi& s : lay.scatterers)
        for (const Roi& q : lay.squares)
            if (s.overlaps(q))
                throw ValidationError("blocks phantom: side too small, features collide");

    // Background rectangles: the grid of x- and y-bands that avoid every
    // feature (squares, both scatterer lines) with a 2px guard.
    const int g = 2;
    const int sq_lo = q1 - sq / 2;       // left/top edge of the near squares
    const int sq_hi = q1 + sq - sq / 2;  // right/bottom edge
    const int sq2_lo = q3 - sq / 2;
    const int sq2_hi = q3 + sq - sq / 2;
    const int hrow_lo = mid - 2, hrow_hi = mid + 2;
    const int vcol_lo = mid - 1, vcol_hi = mid + 1;
    const std::pair<int, int> xbands[4] = {{g, sq_lo - g},
                                           {sq_hi + g, vcol_lo - g},
                                           {vcol_hi + g, sq2_lo - g},
                                           {sq2_hi + g, side - g}};
    const std::pair<int, int> ybands[4] = {{g, sq_lo - g},
                                           {sq_hi + g, hrow_lo - g},
                                           {hrow_hi + g, sq2_lo - g},
                                           {sq2_hi + g, side - g}};
    for (const auto& [y0, y1] : ybands)
        for (const auto& [x0, x1] : xbands)
            if (x1 - x0 >= 8 && y1 - y0 >= 8)
                lay.background_clear.push_back(Roi{x0, y0, x1 - x0, y1 - y0});
    return lay;
}

Raster phantom_blocks_points(int side) {
    const BlocksLayout lay = blocks_points_layout(side);
    Raster r(side, side, lay.background_value);
    auto paint = [&](const Roi& roi, double v) {
        for (int y = roi.y0; y < roi.y0 + roi.h; ++y)
            for (int x = roi.x0; x < roi.x0 + roi.w; ++x)
                r.at(y, x) = v;
    };
    for (size_t i = 0; i < lay.squares.size(); ++i)
        paint(lay.squares[i], lay.square_values[i]);
    for (const Roi& s : lay.scatterers) paint(s, lay.scatterer_value);
    return r;
}

Raster phantom_strips(int side, double low, double high,
                      const std::vector<int>& widths) {
    if (side <= 0) throw ValidationError("strips phantom: side must be positive");
    if (low <= 0.0 || high <= 0.0)
        throw ValidationError("strips phantom: intensity levels must be positive");
    long total = 0;
    for (int w : widths) {
        if (w <= 0) throw ValidationError("strips phantom: widths must be positive");
        total += w;
    }
    const long n = static_cast<long>(widths.size());
    const long gap = n == 0 ? 0 : (side - total) / (n + 1);
    if (n > 0 && gap < 1)
        throw ValidationError("strips phantom: strip widths overflow the raster side");

    Raster r(side, side, low);
    long x = gap;
    for (int w : widths) {
        for (int y = 0; y < side; ++y)
            for (long i = x; i < x + w; ++i) r.at(y, static_cast<int>(i)) = high;
        x += w + gap;
    }
    return r;
}

namespace {
int resolve_height(int side, int height) {
    if (height == 0) return side;
    if (height < 0) throw ValidationError("phantom: height must be positive");
    return height;
}
} // namespace

Raster phantom_step(int side, double left, double right, int height) {
    if (side <= 0) throw ValidationError("step phantom: side must be positive");
    if (left <= 0.0 || right <= 0.0)
        throw ValidationError("step phantom: levels must be positive");
    const int h = resolve_height(side, height);
    Raster r(side, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < side; ++x) r.at(y, x) = x < side / 2 ? left : right;
    return r;
}

Raster phantom_textured_step(int side, uint64_t seed, double left, double right,
                             int height) {
    Raster r = phantom_step(side, left, right, height);
    parallel_for(0, r.height, [&](long y) {
        Rng gen(derive_seed(seed, static_cast<uint64_t>(y)));
        for (int x = 0; x < r.width; ++x)
            r.at(static_cast<int>(y), x) *= gen.exponential();
    });
    return r;
}

Raster phantom_sine(int side, double mean, double amplitude, double period,
                    int height) {
    if (side <= 0) throw ValidationError("sine phantom: side must be positive");
    if (period == 0.0) period = static_cast<double>(side);
    if (period <= 0.0) throw ValidationError("sine phantom: period must be positive");
    if (!(amplitude < mean))
        throw ValidationError("sine phantom: amplitude must be < mean to keep backscatter positive");
    if (amplitude < 0.0) throw ValidationError("sine phantom: amplitude must be >= 0");
    const int h = resolve_height(side, height);
    Raster r(side, h);
    const double two_pi = 6.283185307179586476925286766559;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < side; ++x)
            r.at(y, x) = mean + amplitude * std::sin(two_pi * x / period);
    return r;
}

Raster gamma_speckle(int width, int height, const SpeckleParams& params) {
    if (!(params.looks > 0.0))
        throw ValidationError("gamma_speckle: looks must be > 0");
    Raster r(width, height);
    const double shape = params.looks;
    parallel_for(0, height, [&](long y) {
        Rng gen(derive_seed(params.seed, static_cast<uint64_t>(y)));
        for (int x = 0; x < width; ++x)
            r.at(static_cast<int>(y), x) = gen.gamma(shape) / shape;
    });
    return r;
}

Raster apply_multiplicative(const Raster& x, const Raster& y) {
    if (!x.same_shape(y))
        throw ValidationError("apply_multiplicative: dimension mismatch");
    Raster z = x;
    for (size_t i = 0; i < z.size(); ++i) z.data[i] *= y.data[i];
    return z;
}

Raster apply_additive(const Raster& x, double sigma, uint64_t seed) {
    if (sigma < 0.0) throw ValidationError("apply_additive: sigma must be >= 0");
    Raster z = x;
    if (sigma == 0.0) return z;
    parallel_for(0, z.height, [&](long y) {
        Rng gen(derive_seed(seed, static_cast<uint64_t>(y)));
        for (int x0 = 0; x0 < z.width; ++x0)
            z.at(static_cast<int>(y), x0) += sigma * gen.normal();
    });
    return z;
}

} // namespace sarqa
