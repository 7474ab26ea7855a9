#ifndef SARQA_NUMERIC_HPP
#define SARQA_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sarqa/errors.hpp"

namespace sarqa {

/// Pairwise (cascade) summation. Deterministic for a given element order and
/// exact when summing 2^k copies of the same value, which the homogeneity
/// statistics rely on.
inline double pairwise_sum(std::span<const double> values) {
    const size_t n = values.size();
    if (n == 0) return 0.0;
    if (n == 1) return values[0];
    if (n == 2) return values[0] + values[1];
    const size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Nearest-rank percentile of an unsorted sequence; pct in [0, 100].
inline double percentile_nearest_rank(std::span<const double> values, double pct) {
    if (values.empty()) throw ValidationError("percentile: empty sequence");
    if (!(pct >= 0.0 && pct <= 100.0))
        throw ValidationError("percentile: pct must lie in [0, 100]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    size_t idx = static_cast<size_t>(std::llround(pos));
    if (idx >= sorted.size()) idx = sorted.size() - 1;
    return sorted[idx];
}

} // namespace sarqa

#endif
