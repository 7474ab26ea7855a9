#ifndef SARQA_SECONDORDER_HPP
#define SARQA_SECONDORDER_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "sarqa/raster.hpp"

namespace sarqa {

/// Pixel displacement used when pairing values into a co-occurrence matrix.
struct Offset {
    int dy = 0;
    int dx = 0;
    bool operator==(const Offset&) const = default;
};

/// Raster quantized to 8 gray levels (0..7).
struct QuantRaster {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> levels;

    uint8_t at(int y, int x) const { return levels[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int y, int x) { return levels[static_cast<size_t>(y) * width + x]; }
};

/// 8x8 co-occurrence counts with their normalization constant K.
struct Glcm {
    std::array<std::array<uint64_t, 8>, 8> counts{};
    uint64_t total = 0; // K
    Offset offset;
};

/// Equal-width 8-level binning between the 1st and 99th percentile (values
/// outside are clipped into the end bins). A constant raster maps to level 0.
QuantRaster quantize8(const Raster& r, double clip_low_pct = 1.0,
                      double clip_high_pct = 99.0);

/// Symmetric GLCM over a region: each ordered pair (q(p), q(p+offset)) with
/// both pixels inside the roi is counted in both directions.
Glcm glcm(const QuantRaster& q, const Roi& roi, const Offset& offset);

/// Inverse difference moment, sum_ij p(i,j)/(1+(i-j)^2); in (0, 1].
double homogeneity(const Glcm& g);

/// Mean homogeneity over non-overlapping win x win tiles and the offset
/// list: per tile (row-major) and per offset (list order), h values are
/// collected and averaged with pairwise summation.
double mean_homogeneity(const QuantRaster& q, int win,
                        const std::vector<Offset>& offsets);

/// Fisher-Yates permutation of all pixel values; the value multiset is
/// preserved exactly and the result is a pure function of (input, seed).
Raster shuffle(const Raster& r, uint64_t seed);

/// delta_h decomposition: homogeneity of the image against the mean over p
/// shuffled replicates.
struct SecondOrderReport {
    double h_o = 0.0;
    double h_g_bar = 0.0;
    double delta_h = 0.0; // 100 * |h_o - h_g_bar| / h_o
    int p = 0;
    uint64_t seed = 0;
    std::vector<double> h_g_samples;

    nlohmann::json to_json() const;
};

/// Percentage change of mean homogeneity under random shuffling. Replicate k
/// uses the sub-seed derive_seed(seed, k); replicates run in parallel but
/// aggregate in index order.
SecondOrderReport delta_h(const Raster& ratio, int p, int win,
                          const std::vector<Offset>& offsets, uint64_t seed,
                          double clip_low_pct = 1.0, double clip_high_pct = 99.0);

} // namespace sarqa

#endif
