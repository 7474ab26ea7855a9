#include "sarqa/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sarqa/parallel.hpp"

namespace sarqa {

FilterFamily filter_family_from_string(const std::string& name) {
    if (name == "identity") return FilterFamily::identity;
    if (name == "boxcar") return FilterFamily::boxcar;
    if (name == "elee") return FilterFamily::elee;
    if (name == "srad") return FilterFamily::srad;
    if (name == "external") return FilterFamily::external;
    throw ValidationError("unknown filter family: " + name);
}

std::string to_string(FilterFamily family) {
    switch (family) {
        case FilterFamily::identity: return "identity";
        case FilterFamily::boxcar: return "boxcar";
        case FilterFamily::elee: return "elee";
        case FilterFamily::srad: return "srad";
        case FilterFamily::external: return "external";
    }
    return "?";
}

void FilterSpec::validate() const {
    switch (family) {
        case FilterFamily::identity:
            break;
        case FilterFamily::boxcar:
            if (window < 3 || window % 2 == 0)
                throw ValidationError("boxcar: window must be odd and >= 3");
            break;
        case FilterFamily::elee:
            if (window < 3 || window % 2 == 0)
                throw ValidationError("elee: window must be odd and >= 3");
            if (!(looks > 0.0)) throw ValidationError("elee: looks must be > 0");
            if (!(damping > 0.0)) throw ValidationError("elee: damping must be > 0");
            break;
        case FilterFamily::srad:
            if (iterations < 1) throw ValidationError("srad: T must be >= 1");
            if (!(timestep > 0.0 && timestep <= 0.25))
                throw ValidationError("srad: dt must lie in (0, 0.25]");
            if (q0_window < 3 || q0_window % 2 == 0)
                throw ValidationError("srad: q0 window must be odd and >= 3");
            break;
        case FilterFamily::external:
            if (path.empty()) throw ValidationError("external: path is required");
            break;
    }
}

nlohmann::json FilterSpec::to_json() const {
    nlohmann::json params = nlohmann::json::object();
    switch (family) {
        case FilterFamily::identity: break;
        case FilterFamily::boxcar: params["w"] = window; break;
        case FilterFamily::elee:
            params["w"] = window;
            params["L"] = looks;
            params["k"] = damping;
            break;
        case FilterFamily::srad:
            params["T"] = iterations;
            params["dt"] = timestep;
            params["q0_window"] = q0_window;
            break;
        case FilterFamily::external: params["path"] = path; break;
    }
    return {{"family", to_string(family)}, {"params", params}};
}

FilterSpec FilterSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw ParseError("filter spec: expected {\"family\":...,\"params\":{...}}");
    FilterSpec spec;
    spec.family = filter_family_from_string(j.at("family").get<std::string>());
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    auto geti = [&](const char* key, int dflt) {
        if (!params.contains(key)) return dflt;
        const auto& v = params.at(key);
        if (!v.is_number() || v.get<double>() != std::floor(v.get<double>()))
            throw ValidationError(std::string("filter spec: ") + key + " must be an integer");
        return v.get<int>();
    };
    auto getd = [&](const char* key, double dflt) {
        return params.contains(key) ? params.at(key).get<double>() : dflt;
    };
    switch (spec.family) {
        case FilterFamily::identity: break;
        case FilterFamily::boxcar: spec.window = geti("w", spec.window); break;
        case FilterFamily::elee:
            spec.window = geti("w", 9);
            spec.looks = getd("L", spec.looks);
            spec.damping = getd("k", spec.damping);
            break;
        case FilterFamily::srad:
            spec.iterations = geti("T", spec.iterations);
            spec.timestep = getd("dt", spec.timestep);
            spec.q0_window = geti("q0_window", spec.q0_window);
            break;
        case FilterFamily::external:
            spec.path = params.value("path", std::string());
            break;
    }
    spec.validate();
    return spec;
}

std::string FilterSpec::label() const {
    char buf[128];
    switch (family) {
        case FilterFamily::identity: return "identity";
        case FilterFamily::boxcar:
            std::snprintf(buf, sizeof(buf), "boxcar(w=%d)", window);
            return buf;
        case FilterFamily::elee:
            std::snprintf(buf, sizeof(buf), "elee(w=%d,L=%g,k=%g)", window, looks, damping);
            return buf;
        case FilterFamily::srad:
            std::snprintf(buf, sizeof(buf), "srad(T=%d,dt=%g)", iterations, timestep);
            return buf;
        case FilterFamily::external: return "external(" + path + ")";
    }
    return "?";
}

namespace {

// symmetric (half-sample) mirror: -1 -> 0, n -> n-1
inline int mirror(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

void check_window(int w, const Raster& z, const char* who) {
    if (w < 3 || w % 2 == 0)
        throw ValidationError(std::string(who) + ": window must be odd and >= 3");
    if (w > std::min(z.width, z.height))
        throw ValidationError(std::string(who) + ": window exceeds raster dimensions");
}

} // namespace

Raster filter_boxcar(const Raster& z, int w) {
    check_window(w, z, "boxcar");
    const int half = w / 2;
    // separable: rows then columns
    Raster tmp(z.width, z.height);
    parallel_for(0, z.height, [&](long yy) {
        const int y = static_cast<int>(yy);
        for (int x = 0; x < z.width; ++x) {
            double s = 0.0;
            for (int k = -half; k <= half; ++k) s += z.at(y, mirror(x + k, z.width));
            tmp.at(y, x) = s;
        }
    });
    Raster out(z.width, z.height);
    const double inv = 1.0 / (static_cast<double>(w) * w);
    parallel_for(0, z.height, [&](long yy) {
        const int y = static_cast<int>(yy);
        for (int x = 0; x < z.width; ++x) {
            double s = 0.0;
            for (int k = -half; k <= half; ++k) s += tmp.at(mirror(y + k, z.height), x);
            out.at(y, x) = s * inv;
        }
    });
    return out;
}

Raster filter_elee(const Raster& z, int w, double looks, double damping) {
    check_window(w, z, "elee");
    if (!(looks > 0.0)) throw ValidationError("elee: looks must be > 0");
    if (!(damping > 0.0)) throw ValidationError("elee: damping must be > 0");
    const int half = w / 2;
    const double cu = 1.0 / std::sqrt(looks);
    const double cmax = std::sqrt(1.0 + 2.0 / looks);
    Raster out(z.width, z.height);
    parallel_for(0, z.height, [&](long yy) {
        const int y = static_cast<int>(yy);
        for (int x = 0; x < z.width; ++x) {
            double sum = 0.0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx)
                    sum += z.at(mirror(y + dy, z.height), mirror(x + dx, z.width));
            const double n = static_cast<double>(w) * w;
            const double mean = sum / n;
            double ss = 0.0;
            for (int dy = -half; dy <= half; ++dy)
                for (int dx = -half; dx <= half; ++dx) {
                    const double d =
                        z.at(mirror(y + dy, z.height), mirror(x + dx, z.width)) - mean;
                    ss += d * d;
                }
            const double sd = std::sqrt(ss / (n - 1.0));
            const double c = mean == 0.0 ? 0.0 : sd / mean;
            const double v = z.at(y, x);
            if (c <= cu) {
                out.at(y, x) = mean;
            } else if (c < cmax) {
                const double wgt = std::exp(-damping * (c - cu) / (cmax - c));
                out.at(y, x) = wgt * mean + (1.0 - wgt) * v;
            } else {
                out.at(y, x) = v; // point target
            }
        }
    });
    return out;
}

namespace {

double tile_cov(const Raster& img, const Roi& roi) {
    double sum = 0.0, sumsq = 0.0;
    for (int y = roi.y0; y < roi.y0 + roi.h; ++y)
        for (int x = roi.x0; x < roi.x0 + roi.w; ++x) {
            const double v = img.at(y, x);
            sum += v;
            sumsq += v * v;
        }
    const double n = static_cast<double>(roi.area());
    const double mean = sum / n;
    double var = (sumsq - sum * sum / n) / (n - 1.0);
    if (!std::isfinite(var))
        return std::numeric_limits<double>::infinity(); // overflow: poison q0
    if (var < 0.0) var = 0.0;
    return mean > 0.0 ? std::sqrt(var) / mean : 0.0;
}

/// Picks the most homogeneous win x win tile of the initial image. The q0
/// window is selected once and q0 is re-estimated on it every iteration;
/// re-picking the minimum each time under-estimates the speckle scale
/// (the fastest-smoothed tile wins) and stalls the diffusion.
Roi select_q0_window(const Raster& img, int win) {
    const int tiles_y = img.height / win;
    const int tiles_x = img.width / win;
    if (tiles_y == 0 || tiles_x == 0) return Roi{0, 0, img.width, img.height};
    Roi best{0, 0, win, win};
    double best_cov = std::numeric_limits<double>::infinity();
    for (int ty = 0; ty < tiles_y; ++ty)
        for (int tx = 0; tx < tiles_x; ++tx) {
            const Roi tile{tx * win, ty * win, win, win};
            const double cov = tile_cov(img, tile);
            if (cov < best_cov) {
                best_cov = cov;
                best = tile;
            }
        }
    return best;
}

} // namespace

Raster filter_srad(const Raster& z, int iterations, double timestep, int q0_window) {
    if (iterations < 0) throw ValidationError("srad: T must be >= 0");
    if (!(timestep > 0.0 && timestep <= 0.25))
        throw ValidationError("srad: dt must lie in (0, 0.25]");
    if (q0_window < 3 || q0_window % 2 == 0)
        throw ValidationError("srad: q0 window must be odd and >= 3");
    for (double v : z.data)
        if (!(v > 0.0))
            throw ValidationError("srad: input must be strictly positive");

    Raster cur = z;
    Raster coef(z.width, z.height);
    Raster next(z.width, z.height);
    const int W = z.width, H = z.height;
    auto clampi = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    const Roi q0_roi = select_q0_window(z, q0_window);

    for (int it = 0; it < iterations; ++it) {
        const double q0 = tile_cov(cur, q0_roi);
        const double q02 = q0 * q0;

        parallel_for(0, H, [&](long yy) {
            const int y = static_cast<int>(yy);
            for (int x = 0; x < W; ++x) {
                const double v = cur.at(y, x);
                const double dn = cur.at(clampi(y - 1, H), x) - v;
                const double ds = cur.at(clampi(y + 1, H), x) - v;
                const double dw = cur.at(y, clampi(x - 1, W)) - v;
                const double de = cur.at(y, clampi(x + 1, W)) - v;
                const double g2 = (dn * dn + ds * ds + dw * dw + de * de) / (v * v);
                const double lap = (dn + ds + dw + de) / v;
                const double den = 1.0 + 0.25 * lap;
                double q2 = (0.5 * g2 - (1.0 / 16.0) * lap * lap) / (den * den);
                if (q2 < 0.0) q2 = 0.0;
                double c;
                if (q02 > 0.0) {
                    c = 1.0 / (1.0 + (q2 - q02) / (q02 * (1.0 + q02)));
                } else {
                    c = 1.0; // flat image: no speckle scale, gradients are 0 anyway
                }
                coef.at(y, x) = std::clamp(c, 0.0, 1.0);
            }
        });

        parallel_for(0, H, [&](long yy) {
            const int y = static_cast<int>(yy);
            for (int x = 0; x < W; ++x) {
                const double v = cur.at(y, x);
                const double dn = cur.at(clampi(y - 1, H), x) - v;
                const double ds = cur.at(clampi(y + 1, H), x) - v;
                const double dw = cur.at(y, clampi(x - 1, W)) - v;
                const double de = cur.at(y, clampi(x + 1, W)) - v;
                const double cc = coef.at(y, x);
                const double cs = coef.at(clampi(y + 1, H), x);
                const double ce = coef.at(y, clampi(x + 1, W));
                const double div = cc * dn + cs * ds + cc * dw + ce * de;
                next.at(y, x) = v + timestep * div;
            }
        });

        std::swap(cur.data, next.data);
        for (double v : cur.data)
            if (!std::isfinite(v))
                throw ValidationError("srad: diverged (non-finite value) at iteration " +
                                      std::to_string(it + 1));
    }
    return cur;
}

Raster filter_identity(const Raster& z) { return z; }

Raster apply_filter(const Raster& z, const FilterSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case FilterFamily::identity: return filter_identity(z);
        case FilterFamily::boxcar: return filter_boxcar(z, spec.window);
        case FilterFamily::elee:
            return filter_elee(z, spec.window, spec.looks, spec.damping);
        case FilterFamily::srad:
            return filter_srad(z, spec.iterations, spec.timestep, spec.q0_window);
        case FilterFamily::external: {
            Raster out = load_raster(spec.path);
            if (!out.same_shape(z))
                throw ValidationError("external filter result has mismatching dimensions");
            return out;
        }
    }
    throw ValidationError("unreachable filter family");
}

} // namespace sarqa
