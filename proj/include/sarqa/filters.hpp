#ifndef SARQA_FILTERS_HPP
#define SARQA_FILTERS_HPP

#include <string>

#include "json.hpp"

#include "sarqa/raster.hpp"

namespace sarqa {

enum class FilterFamily { identity, boxcar, elee, srad, external };

FilterFamily filter_family_from_string(const std::string& name);
std::string to_string(FilterFamily family);

/// Tagged description of a filter configuration; the JSON form
/// {"family":"srad","params":{"T":300,"dt":0.05}} is shared by the CLI and
/// the tuner.
struct FilterSpec {
    FilterFamily family = FilterFamily::identity;
    int window = 5;        // boxcar, elee (odd, >= 3)
    double looks = 1.0;    // elee
    double damping = 0.3;  // elee
    int iterations = 300;  // srad (>= 1 in specs; the op itself accepts 0)
    double timestep = 0.05; // srad, in (0, 0.25]
    int q0_window = 25;    // srad homogeneous-window side
    std::string path;      // external: precomputed result to ingest

    void validate() const;
    nlohmann::json to_json() const;
    static FilterSpec from_json(const nlohmann::json& j);
    /// One-line textual form, e.g. "boxcar(w=5)", used in reports.
    std::string label() const;
};

/// Local mean over a w x w neighborhood, symmetric (mirror) boundaries.
Raster filter_boxcar(const Raster& z, int w);

/// Enhanced Lee: per-pixel classification by the local coefficient of
/// variation C against Cu = 1/sqrt(L) and Cmax = sqrt(1+2/L). Homogeneous
/// pixels take the window mean, point targets pass through, and the
/// heterogeneous class blends xhat = W*mean + (1-W)*z with
/// W = exp(-k*(C-Cu)/(Cmax-C)).
Raster filter_elee(const Raster& z, int w, double looks, double damping = 0.3);

/// Speckle reducing anisotropic diffusion: T explicit steps with Neumann
/// boundaries; the diffusion threshold q0 is re-estimated each iteration from
/// the most homogeneous q0_window x q0_window tile.
Raster filter_srad(const Raster& z, int iterations, double timestep = 0.05,
                   int q0_window = 25);

Raster filter_identity(const Raster& z);

/// Applies the configuration; external specs load `path` and check shape.
Raster apply_filter(const Raster& z, const FilterSpec& spec);

} // namespace sarqa

#endif
