#ifndef SARQA_METRICS_HPP
#define SARQA_METRICS_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "sarqa/raster.hpp"

namespace sarqa {

/// Peak signal-to-noise ratio in dB: 20*log10(peak) - 10*log10(MSE).
/// Identical images return +infinity. peak <= 0 selects max(ref).
double psnr(const Raster& ref, const Raster& test, double peak = 0.0);

/// Mean structural similarity over 11x11 Gaussian windows (sigma 1.5),
/// stabilizing constants C1=(0.01*R)^2, C2=(0.03*R)^2 with R the joint
/// dynamic range max(ref, test). Windows are taken over the valid interior.
double mssim(const Raster& ref, const Raster& test);

/// Edge-correlation index: Pearson correlation of the 3x3 Laplacian
/// high-pass responses of both images. 1 for perfect edge preservation.
/// Constant images have no edge energy and are rejected.
double beta_edges(const Raster& ref, const Raster& test);

/// One labeled ROI row of the comparison table.
struct RoiTableRow {
    std::string label;
    Roi roi;
    SummaryStats truth;
    SummaryStats noisy;
    SummaryStats filtered;
};

/// Per-ROI mean/std/ENL for truth, noisy, and filtered rasters.
std::vector<RoiTableRow> roi_table(const Raster& truth, const Raster& noisy,
                                   const Raster& filtered,
                                   const std::vector<std::pair<std::string, Roi>>& rois);

std::string roi_table_csv(const std::vector<RoiTableRow>& rows);
nlohmann::json roi_table_json(const std::vector<RoiTableRow>& rows);

} // namespace sarqa

#endif
