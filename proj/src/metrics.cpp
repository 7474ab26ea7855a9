#include "sarqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sarqa {

double psnr(const Raster& ref, const Raster& test, double peak) {
    if (!ref.same_shape(test)) throw ValidationError("psnr: dimension mismatch");
    if (peak <= 0.0) {
        peak = *std::max_element(ref.data.begin(), ref.data.end());
        if (peak <= 0.0) throw ValidationError("psnr: peak must be > 0");
    }
    double mse = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        const double d = ref.data[i] - test.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(ref.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak) - 10.0 * std::log10(mse);
}

double mssim(const Raster& ref, const Raster& test) {
    if (!ref.same_shape(test)) throw ValidationError("mssim: dimension mismatch");
    const int win = 11;
    if (ref.width < win || ref.height < win)
        throw ValidationError("mssim: raster smaller than the 11x11 window");

    // 11-tap Gaussian, sigma 1.5, normalized
    double taps[win];
    double norm = 0.0;
    for (int i = 0; i < win; ++i) {
        const double d = i - 5.0;
        taps[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        norm += taps[i];
    }
    for (double& t : taps) t /= norm;

    // dynamic range from the reference; taking it from the noisy image would
    // inflate the stabilizing constants past the local statistics
    double range = *std::max_element(ref.data.begin(), ref.data.end());
    if (range <= 0.0) range = 1.0;
    const double c1 = (0.01 * range) * (0.01 * range);
    const double c2 = (0.03 * range) * (0.03 * range);

    const int xs = ref.width - win + 1;
    const int ys = ref.height - win + 1;
    double total = 0.0;
    for (int y0 = 0; y0 < ys; ++y0) {
        for (int x0 = 0; x0 < xs; ++x0) {
            double mu_r = 0.0, mu_t = 0.0;
            double rr = 0.0, tt = 0.0, rt = 0.0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    const double wgt = taps[dy] * taps[dx];
                    const double a = ref.at(y0 + dy, x0 + dx);
                    const double b = test.at(y0 + dy, x0 + dx);
                    mu_r += wgt * a;
                    mu_t += wgt * b;
                    rr += wgt * a * a;
                    tt += wgt * b * b;
                    rt += wgt * a * b;
                }
            const double var_r = rr - mu_r * mu_r;
            const double var_t = tt - mu_t * mu_t;
            const double cov = rt - mu_r * mu_t;
            const double num = (2.0 * mu_r * mu_t + c1) * (2.0 * cov + c2);
            const double den = (mu_r * mu_r + mu_t * mu_t + c1) * (var_r + var_t + c2);
            total += num / den;
        }
    }
    return total / (static_cast<double>(xs) * ys);
}

namespace {

inline int mirror(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

/// 4-neighbor Laplacian high-pass with mirror boundaries.
Raster laplacian(const Raster& r) {
    Raster out(r.width, r.height);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            out.at(y, x) = r.at(mirror(y - 1, r.height), x) +
                           r.at(mirror(y + 1, r.height), x) +
                           r.at(y, mirror(x - 1, r.width)) +
                           r.at(y, mirror(x + 1, r.width)) - 4.0 * r.at(y, x);
    return out;
}

} // namespace

double beta_edges(const Raster& ref, const Raster& test) {
    if (!ref.same_shape(test)) throw ValidationError("beta_edges: dimension mismatch");
    const Raster dr = laplacian(ref);
    const Raster dt = laplacian(test);
    double mr = 0.0, mt = 0.0;
    for (size_t i = 0; i < dr.size(); ++i) {
        mr += dr.data[i];
        mt += dt.data[i];
    }
    mr /= static_cast<double>(dr.size());
    mt /= static_cast<double>(dt.size());
    double srr = 0.0, stt = 0.0, srt = 0.0;
    for (size_t i = 0; i < dr.size(); ++i) {
        const double a = dr.data[i] - mr;
        const double b = dt.data[i] - mt;
        srr += a * a;
        stt += b * b;
        srt += a * b;
    }
    if (srr == 0.0 || stt == 0.0)
        throw ValidationError("beta_edges: image has no edge energy (constant input)");
    return srt / std::sqrt(srr * stt);
}

std::vector<RoiTableRow> roi_table(const Raster& truth, const Raster& noisy,
                                   const Raster& filtered,
                                   const std::vector<std::pair<std::string, Roi>>& rois) {
    if (!truth.same_shape(noisy) || !truth.same_shape(filtered))
        throw ValidationError("roi_table: dimension mismatch");
    std::vector<RoiTableRow> rows;
    rows.reserve(rois.size());
    for (const auto& [label, roi] : rois) {
        if (!roi.valid_in(truth))
            throw ValidationError("roi_table: roi '" + label + "' outside raster");
        RoiTableRow row;
        row.label = label;
        row.roi = roi;
        row.truth = roi_stats(truth, roi);
        row.noisy = roi_stats(noisy, roi);
        row.filtered = roi_stats(filtered, roi);
        rows.push_back(row);
    }
    return rows;
}

namespace {
void append_stats_csv(std::string& out, const SummaryStats& s) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), ",%.6g,%.6g,%.6g", s.mean, s.std, s.enl);
    out += buf;
}

nlohmann::json stats_json(const SummaryStats& s) {
    nlohmann::json j{{"mean", s.mean}, {"std", s.std}};
    if (std::isfinite(s.enl))
        j["enl"] = s.enl;
    else
        j["enl"] = nullptr; // infinity sentinel has no JSON number
    return j;
}
} // namespace

std::string roi_table_csv(const std::vector<RoiTableRow>& rows) {
    std::string out = "label,mu_true,s_true,enl_true,mu_noisy,s_noisy,enl_noisy,"
                      "mu_filtered,s_filtered,enl_filtered\n";
    for (const RoiTableRow& row : rows) {
        out += row.label;
        append_stats_csv(out, row.truth);
        append_stats_csv(out, row.noisy);
        append_stats_csv(out, row.filtered);
        out += '\n';
    }
    return out;
}

nlohmann::json roi_table_json(const std::vector<RoiTableRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RoiTableRow& row : rows)
        arr.push_back({{"label", row.label},
                       {"roi", {{"x0", row.roi.x0}, {"y0", row.roi.y0},
                                {"w", row.roi.w}, {"h", row.roi.h}}},
                       {"truth", stats_json(row.truth)},
                       {"noisy", stats_json(row.noisy)},
                       {"filtered", stats_json(row.filtered)}});
    return arr;
}

} // namespace sarqa
