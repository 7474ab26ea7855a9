#ifndef SARQA_TUNE_HPP
#define SARQA_TUNE_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sarqa/filters.hpp"
#include "sarqa/quality.hpp"
#include "sarqa/raster.hpp"

namespace sarqa {

/// Exhaustive parameter grid for one filter family. Enumeration is row-major
/// over the axes as declared: the first axis varies slowest.
struct ParamGrid {
    FilterFamily family = FilterFamily::boxcar;
    std::vector<std::pair<std::string, std::vector<double>>> axes;

    size_t size() const;
    /// Grid point `index` as a concrete FilterSpec (throws on invalid values).
    FilterSpec spec_at(size_t index) const;
    /// Axis values of grid point `index`, in axis order.
    std::vector<double> values_at(size_t index) const;

    nlohmann::json to_json() const;
    static ParamGrid from_json(const nlohmann::json& j);
};

/// One evaluated grid point; failed evaluations carry the error text instead
/// of a report and are excluded from the argmin.
struct TuneRow {
    size_t index = 0;
    std::vector<double> values;
    std::optional<MReport> report;
    std::string error;
    double wall_time_s = 0.0;
};

struct TuneTrace {
    ParamGrid grid;
    std::vector<TuneRow> rows;
    size_t best_index = 0; // argmin by M, ties broken by grid order

    const TuneRow& best() const { return rows[best_index]; }
    /// include_timings keeps the default file outputs byte-stable across runs.
    nlohmann::json to_json(bool include_timings = false) const;
    std::string to_csv(bool include_timings = false) const;
};

/// Evaluates M for every grid point with the same evaluation config and seed
/// so that score differences reflect parameters only. Points run
/// concurrently; the trace is assembled in declared grid order. Throws if
/// every point fails.
TuneTrace grid_search(const Raster& z, const ParamGrid& grid, double looks,
                      const EvalConfig& cfg);

} // namespace sarqa

#endif
