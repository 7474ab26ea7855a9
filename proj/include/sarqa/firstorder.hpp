#ifndef SARQA_FIRSTORDER_HPP
#define SARQA_FIRSTORDER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sarqa/raster.hpp"

namespace sarqa {

/// Per-pixel sliding-window statistics (mirror boundaries).
struct LocalStatsField {
    Raster mean;
    Raster std;
    Raster enl; // +infinity where the window variance is exactly zero
    int window = 0;
};

LocalStatsField local_stats(const Raster& r, int window);

/// How candidate windows are admitted as textureless.
///  - paper: |ENL_ratio - ENL_noisy|/ENL_noisy <= tol and |mu_ratio - 1| <= tol.
///  - noisy: textureless-ness is judged on the noisy image alone,
///    |ENL_noisy - looks|/looks <= tol_detect, leaving the ratio residuals
///    free to exceed the tolerance.
enum class SelectionMode { noisy, paper };

SelectionMode selection_mode_from_string(const std::string& name);
std::string to_string(SelectionMode mode);

struct SelectionConfig {
    int window = 25;
    double tol = 0.03;
    double tol_detect = 0.25;
    SelectionMode mode = SelectionMode::noisy;
    double looks = 1.0; // nominal L, required by the noisy mode
};

/// One accepted window with the statistics the residual needs.
struct SelectedWindow {
    Roi roi;
    double enl_noisy = 0.0;
    double enl_ratio = 0.0;
    double mu_ratio = 0.0;
};

struct AreaSelection {
    std::vector<SelectedWindow> windows;
    int window = 0;
    double tol = 0.0;
    SelectionMode mode = SelectionMode::noisy;

    int n() const { return static_cast<int>(windows.size()); }
    nlohmann::json to_json() const;
};

/// Greedy scan over window positions (stride w/2, row-major), keeping
/// accepted windows pairwise disjoint. Windows whose ENL is the infinity
/// sentinel on either image are never selected. Throws NoTexturelessArea
/// when nothing qualifies.
AreaSelection select_areas(const Raster& z, const Raster& ratio,
                           const SelectionConfig& cfg);

/// First-order residual over the selected windows:
///   r = 1/2 * sum_i ( |ENL_noisy(i) - ENL_ratio(i)| / ENL_noisy(i)
///                     + |1 - mu_ratio(i)| )
/// A sum, not a mean; duplicating the list doubles r.
double first_order_residual(const AreaSelection& sel);

} // namespace sarqa

#endif
