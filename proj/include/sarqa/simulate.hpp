#ifndef SARQA_SIMULATE_HPP
#define SARQA_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sarqa/raster.hpp"

namespace sarqa {

/// Speckle configuration: number of looks (Gamma shape, unit mean) and the
/// seed of the deterministic generator stream.
struct SpeckleParams {
    double looks = 1.0;
    uint64_t seed = 0;
};

enum class PhantomKind { blocks_points, strips, step, textured_step, sine };

PhantomKind phantom_kind_from_string(const std::string& name);
std::string to_string(PhantomKind kind);

/// Scene geometry of the blocks-and-points phantom, exposed so evaluation
/// code can build ROIs that are guaranteed clear of any feature.
struct BlocksLayout {
    int side = 0;
    std::vector<Roi> squares;          // tl, tr, bl, br
    std::vector<double> square_values; // 2, 40, 60, 80
    std::vector<Roi> scatterers;       // all forty bright targets
    std::vector<Roi> background_clear; // rectangles containing only background
    double background_value = 10.0;
    double scatterer_value = 240.0;
};

BlocksLayout blocks_points_layout(int side);

/// Synthetic backscatter: 10 background, four squares {2,40,60,80} centered
/// in the quadrants, and two rows of twenty bright scatterers (240) crossing
/// between them.
Raster phantom_blocks_points(int side = 500);

/// Vertical strips of value `high` on background `low`, widths left to right
/// with equal-width gaps.
Raster phantom_strips(int side, double low = 1.0, double high = 20.0,
                      const std::vector<int>& widths = {2, 4, 8, 16, 32});

/// Two-level step: left half `left`, right half `right`. height 0 = square.
Raster phantom_step(int side, double left = 11.0, double right = 1.0,
                    int height = 0);

/// Step whose levels are modulated by i.i.d. unit-mean exponential texture;
/// speckling the result yields K-distributed observations.
Raster phantom_textured_step(int side, uint64_t seed, double left = 11.0,
                             double right = 1.0, int height = 0);

/// Positive sinusoid along x: mean + amplitude*sin(2*pi*x/period). Requires
/// amplitude < mean so backscatter stays positive.
Raster phantom_sine(int side, double mean = 10.0, double amplitude = 5.0,
                    double period = 0.0, int height = 0);

/// i.i.d. Gamma(shape = looks, mean = 1) field. Rows use split generator
/// streams, so the result is identical for any thread count.
Raster gamma_speckle(int width, int height, const SpeckleParams& params);

/// Z = X .* Y, the multiplicative observation model.
Raster apply_multiplicative(const Raster& x, const Raster& y);

/// Z = X + N(0, sigma^2), the additive observation model.
Raster apply_additive(const Raster& x, double sigma, uint64_t seed);

} // namespace sarqa

#endif
