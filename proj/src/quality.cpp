#include "sarqa/quality.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace sarqa {

nlohmann::json EvalConfig::to_json() const {
    nlohmann::json offs = nlohmann::json::array();
    for (const Offset& o : offsets) offs.push_back({o.dy, o.dx});
    return {{"w", window},
            {"tol", tol},
            {"tol_detect", tol_detect},
            {"mode", to_string(mode)},
            {"p", shuffles},
            {"win", glcm_window},
            {"offsets", offs},
            {"quant_percentiles", {quant_low_pct, quant_high_pct}},
            {"eps", eps},
            {"seed", seed}};
}

nlohmann::json MReport::to_json() const {
    return {{"r", r},
            {"h_o", h_o},
            {"h_g_bar", h_g_bar},
            {"delta_h", delta_h},
            {"M", m},
            {"n", n},
            {"mode", to_string(mode)},
            {"model", model},
            {"seed", seed},
            {"looks", looks},
            {"config", config.to_json()},
            {"selection", selection},
            {"second_order", second_order.to_json()}};
}

std::string MReport::csv_header() { return "label,h_o,h_g_bar,delta_h,r,M"; }

std::string MReport::csv_row(const std::string& label) const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%.6g,%.6g,%.6g", label.c_str(),
                  h_o, h_g_bar, delta_h, r, m);
    return buf;
}

Raster ratio_image(const Raster& z, const Raster& xhat, double eps) {
    if (!z.same_shape(xhat)) throw ValidationError("ratio_image: dimension mismatch");
    if (!(eps > 0.0)) throw ValidationError("ratio_image: eps must be > 0");
    Raster out = z;
    for (size_t i = 0; i < out.size(); ++i) {
        if (z.data[i] < 0.0 || xhat.data[i] < 0.0)
            throw ValidationError("ratio_image: negative intensity value");
        out.data[i] = z.data[i] / std::max(xhat.data[i], eps);
    }
    return out;
}

MReport evaluate_m(const Raster& z, const Raster& xhat, double looks,
                   const EvalConfig& cfg) {
    if (!(looks > 0.0)) throw ValidationError("evaluate_m: looks must be > 0");
    const Raster ratio = ratio_image(z, xhat, cfg.eps);

    SelectionConfig scfg;
    scfg.window = cfg.window;
    scfg.tol = cfg.tol;
    scfg.tol_detect = cfg.tol_detect;
    scfg.mode = cfg.mode;
    scfg.looks = looks;
    const AreaSelection sel = select_areas(z, ratio, scfg);

    MReport rep;
    rep.r = first_order_residual(sel);
    rep.second_order = delta_h(ratio, cfg.shuffles, cfg.glcm_window, cfg.offsets,
                               cfg.seed, cfg.quant_low_pct, cfg.quant_high_pct);
    rep.h_o = rep.second_order.h_o;
    rep.h_g_bar = rep.second_order.h_g_bar;
    rep.delta_h = rep.second_order.delta_h;
    rep.m = rep.r + rep.delta_h;
    rep.n = sel.n();
    rep.mode = cfg.mode;
    rep.seed = cfg.seed;
    rep.looks = looks;
    rep.model = "multiplicative";
    rep.config = cfg;
    rep.selection = sel.to_json();
    if (!std::isfinite(rep.m))
        throw ValidationError("evaluate_m: non-finite score");
    return rep;
}

namespace {

struct AdditiveWindow {
    Roi roi;
    double mu_res = 0.0;
    double s_res = 0.0;
    double s_noisy = 0.0;
};

SummaryStats window_stats_of(const Raster& r, const Roi& roi) {
    return roi_stats(r, roi);
}

} // namespace

MReport evaluate_m_additive(const Raster& z, const Raster& xhat, double sigma,
                            const EvalConfig& cfg) {
    if (!z.same_shape(xhat))
        throw ValidationError("evaluate_m_additive: dimension mismatch");
    if (!(sigma > 0.0)) throw ValidationError("evaluate_m_additive: sigma must be > 0");

    Raster residual = z;
    for (size_t i = 0; i < residual.size(); ++i) residual.data[i] -= xhat.data[i];

    // Window selection mirrors the multiplicative rule with the Gaussian
    // ideal: under noisy mode a window is textureless when the observed std
    // matches sigma; under paper mode the residual must already match. Zero
    // variance residual windows are the degenerate xhat = z case and are
    // never selected.
    const int w = cfg.window;
    if (w < 3 || w % 2 == 0)
        throw ValidationError("evaluate_m_additive: window must be odd and >= 3");
    if (z.width < w || z.height < w)
        throw ValidationError("evaluate_m_additive: raster smaller than the window");
    const int stride = std::max(1, w / 2);
    std::vector<AdditiveWindow> windows;
    std::vector<Roi> accepted;
    for (int y0 = 0; y0 + w <= z.height; y0 += stride) {
        for (int x0 = 0; x0 + w <= z.width; x0 += stride) {
            const Roi roi{x0, y0, w, w};
            bool overlaps = false;
            for (const Roi& acc : accepted)
                if (roi.overlaps(acc)) { overlaps = true; break; }
            if (overlaps) continue;
            const SummaryStats sz = window_stats_of(z, roi);
            const SummaryStats sres = window_stats_of(residual, roi);
            if (sres.std == 0.0) continue;
            bool accept;
            if (cfg.mode == SelectionMode::paper) {
                accept = sz.std > 0.0 &&
                         std::abs(sres.std - sz.std) / sz.std <= cfg.tol &&
                         std::abs(sres.mean) / sigma <= cfg.tol;
            } else {
                accept = std::abs(sz.std - sigma) / sigma <= cfg.tol_detect;
            }
            if (!accept) continue;
            accepted.push_back(roi);
            windows.push_back(AdditiveWindow{roi, sres.mean, sres.std, sz.std});
        }
    }
    if (windows.empty())
        throw NoTexturelessArea("no textureless area found in the additive residual");

    double sum = 0.0;
    nlohmann::json warr = nlohmann::json::array();
    for (const AdditiveWindow& aw : windows) {
        sum += std::abs(aw.mu_res) / sigma + std::abs(aw.s_res - sigma) / sigma;
        warr.push_back({{"x0", aw.roi.x0},
                        {"y0", aw.roi.y0},
                        {"w", aw.roi.w},
                        {"h", aw.roi.h},
                        {"mu_res", aw.mu_res},
                        {"s_res", aw.s_res},
                        {"s_noisy", aw.s_noisy}});
    }

    MReport rep;
    rep.r = 0.5 * sum;
    rep.second_order = delta_h(residual, cfg.shuffles, cfg.glcm_window, cfg.offsets,
                               cfg.seed, cfg.quant_low_pct, cfg.quant_high_pct);
    rep.h_o = rep.second_order.h_o;
    rep.h_g_bar = rep.second_order.h_g_bar;
    rep.delta_h = rep.second_order.delta_h;
    rep.m = rep.r + rep.delta_h;
    rep.n = static_cast<int>(windows.size());
    rep.mode = cfg.mode;
    rep.seed = cfg.seed;
    rep.looks = sigma;
    rep.model = "additive";
    rep.config = cfg;
    rep.selection = {{"n", rep.n},
                     {"window", w},
                     {"tol", cfg.tol},
                     {"mode", to_string(cfg.mode)},
                     {"windows", warr}};
    if (!std::isfinite(rep.m))
        throw ValidationError("evaluate_m_additive: non-finite score");
    return rep;
}

} // namespace sarqa
