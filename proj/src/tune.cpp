#include "sarqa/tune.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "sarqa/parallel.hpp"

namespace sarqa {

size_t ParamGrid::size() const {
    size_t n = 1;
    for (const auto& [name, values] : axes) n *= values.size();
    return axes.empty() ? 1 : n;
}

std::vector<double> ParamGrid::values_at(size_t index) const {
    std::vector<double> out(axes.size());
    size_t rem = index;
    for (size_t a = axes.size(); a-- > 0;) {
        const size_t len = axes[a].second.size();
        out[a] = axes[a].second[rem % len];
        rem /= len;
    }
    return out;
}

FilterSpec ParamGrid::spec_at(size_t index) const {
    FilterSpec spec;
    spec.family = family;
    const std::vector<double> vals = values_at(index);
    auto as_int = [](const std::string& name, double v) {
        if (v != std::floor(v))
            throw ValidationError("grid: parameter " + name + " must be an integer");
        return static_cast<int>(v);
    };
    for (size_t a = 0; a < axes.size(); ++a) {
        const std::string& name = axes[a].first;
        const double v = vals[a];
        if (name == "w") spec.window = as_int(name, v);
        else if (name == "L") spec.looks = v;
        else if (name == "k") spec.damping = v;
        else if (name == "T") spec.iterations = as_int(name, v);
        else if (name == "dt") spec.timestep = v;
        else if (name == "q0_window") spec.q0_window = as_int(name, v);
        else throw ValidationError("grid: unknown parameter name: " + name);
    }
    spec.validate();
    return spec;
}

nlohmann::json ParamGrid::to_json() const {
    nlohmann::json jaxes = nlohmann::json::array();
    for (const auto& [name, values] : axes) jaxes.push_back({name, values});
    return {{"family", to_string(family)}, {"axes", jaxes}};
}

ParamGrid ParamGrid::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.contains("axes") ||
        !j.at("axes").is_array())
        throw ParseError("grid: expected {\"family\":...,\"axes\":[[name,[values]],...]}");
    ParamGrid grid;
    grid.family = filter_family_from_string(j.at("family").get<std::string>());
    if (grid.family == FilterFamily::external)
        throw ValidationError("grid: the external family cannot be tuned");
    for (const auto& axis : j.at("axes")) {
        if (!axis.is_array() || axis.size() != 2 || !axis[0].is_string() ||
            !axis[1].is_array() || axis[1].empty())
            throw ParseError("grid: each axis must be [name, [values...]]");
        std::vector<double> values;
        for (const auto& v : axis[1]) {
            if (!v.is_number()) throw ParseError("grid: axis values must be numbers");
            values.push_back(v.get<double>());
        }
        grid.axes.emplace_back(axis[0].get<std::string>(), std::move(values));
    }
    if (grid.axes.empty()) throw ValidationError("grid: at least one axis required");
    return grid;
}

nlohmann::json TuneTrace::to_json(bool include_timings) const {
    nlohmann::json jrows = nlohmann::json::array();
    for (const TuneRow& row : rows) {
        nlohmann::json params = nlohmann::json::object();
        for (size_t a = 0; a < grid.axes.size(); ++a)
            params[grid.axes[a].first] = row.values[a];
        nlohmann::json jr{{"index", row.index}, {"params", params}};
        if (row.report) {
            jr["report"] = row.report->to_json();
            jr["M"] = row.report->m;
        } else {
            jr["error"] = row.error;
        }
        if (include_timings) jr["wall_time_s"] = row.wall_time_s;
        jrows.push_back(jr);
    }
    return {{"grid", grid.to_json()},
            {"rows", jrows},
            {"best_index", best_index},
            {"best_spec", grid.spec_at(best_index).to_json()}};
}

std::string TuneTrace::to_csv(bool include_timings) const {
    std::string out = "index";
    for (const auto& [name, values] : grid.axes) out += "," + name;
    out += ",h_o,h_g_bar,delta_h,r,M,status";
    if (include_timings) out += ",wall_time_s";
    out += '\n';
    for (const TuneRow& row : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%zu", row.index);
        out += buf;
        for (double v : row.values) {
            std::snprintf(buf, sizeof(buf), ",%.6g", v);
            out += buf;
        }
        if (row.report) {
            const MReport& r = *row.report;
            std::snprintf(buf, sizeof(buf), ",%.6g,%.6g,%.6g,%.6g,%.6g,ok", r.h_o,
                          r.h_g_bar, r.delta_h, r.r, r.m);
            out += buf;
        } else {
            out += ",,,,,,failed";
        }
        if (include_timings) {
            std::snprintf(buf, sizeof(buf), ",%.3f", row.wall_time_s);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

TuneTrace grid_search(const Raster& z, const ParamGrid& grid, double looks,
                      const EvalConfig& cfg) {
    const size_t count = grid.size();
    if (count == 0) throw ValidationError("grid_search: empty grid");

    TuneTrace trace;
    trace.grid = grid;
    trace.rows.resize(count);

    parallel_for(0, static_cast<long>(count), [&](long i) {
        const size_t idx = static_cast<size_t>(i);
        TuneRow& row = trace.rows[idx];
        row.index = idx;
        row.values = grid.values_at(idx);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const FilterSpec spec = grid.spec_at(idx);
            const Raster xhat = apply_filter(z, spec);
            row.report = evaluate_m(z, xhat, looks, cfg);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    bool found = false;
    for (size_t i = 0; i < count; ++i) {
        if (!trace.rows[i].report) continue;
        if (!found || trace.rows[i].report->m < trace.rows[trace.best_index].report->m) {
            trace.best_index = i;
            found = true;
        }
    }
    if (!found) throw ValidationError("grid_search: every grid point failed");
    return trace;
}

} // namespace sarqa
