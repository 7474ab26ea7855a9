#ifndef SARQA_QUALITY_HPP
#define SARQA_QUALITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sarqa/firstorder.hpp"
#include "sarqa/raster.hpp"
#include "sarqa/secondorder.hpp"

namespace sarqa {

/// Knobs of the full evaluation pipeline. The defaults are frozen: w=25,
/// tol=0.03, p=100, win=11, offsets {(0,1),(1,0)}, percentiles (1,99),
/// mode noisy.
struct EvalConfig {
    int window = 25;
    double tol = 0.03;
    double tol_detect = 0.25;
    SelectionMode mode = SelectionMode::noisy;
    int shuffles = 100; // p
    int glcm_window = 11;
    std::vector<Offset> offsets = {{0, 1}, {1, 0}};
    double quant_low_pct = 1.0;
    double quant_high_pct = 99.0;
    double eps = 1e-12;
    uint64_t seed = 1;

    nlohmann::json to_json() const;
};

/// Full decomposition of the quality score M = r + delta_h.
struct MReport {
    double r = 0.0;
    double h_o = 0.0;
    double h_g_bar = 0.0;
    double delta_h = 0.0;
    double m = 0.0;
    int n = 0;
    SelectionMode mode = SelectionMode::noisy;
    uint64_t seed = 0;
    double looks = 0.0;      // nominal looks (multiplicative) or sigma (additive)
    std::string model;       // "multiplicative" | "additive"
    EvalConfig config;
    nlohmann::json selection;    // audit: accepted windows and their triples
    SecondOrderReport second_order;

    nlohmann::json to_json() const;
    /// One comparison-table CSV row: h_o, h_g_bar, delta_h, r, M (6 significant digits).
    std::string csv_row(const std::string& label) const;
    static std::string csv_header();
};

/// I = Z ./ max(Xhat, eps).
Raster ratio_image(const Raster& z, const Raster& xhat, double eps = 1e-12);

/// Unassisted quality score under the multiplicative model. Lower is better;
/// the ideal filter scores near zero. Throws NoTexturelessArea when the
/// selection fails.
MReport evaluate_m(const Raster& z, const Raster& xhat, double looks,
                   const EvalConfig& cfg = {});

/// Additive-model variant: the pipeline runs on the residual Z - Xhat with
/// first-order targets mean 0 and std sigma: per window,
/// r_add(i) = |mu_res(i)|/sigma + |s_res(i) - sigma|/sigma, summed and halved.
MReport evaluate_m_additive(const Raster& z, const Raster& xhat, double sigma,
                            const EvalConfig& cfg = {});

} // namespace sarqa

#endif
