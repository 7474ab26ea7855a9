#ifndef SARQA_PARALLEL_HPP
#define SARQA_PARALLEL_HPP

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace sarqa {

/// Global worker cap used by parallel_for. 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs f(i) for i in [begin, end), split into contiguous chunks across
/// worker threads. Each index is processed exactly once; results must not
/// depend on chunk assignment (callers only write to index-owned slots).
template <typename F>
void parallel_for(long begin, long end, F&& f) {
    const long count = end - begin;
    if (count <= 0) return;
    int workers = max_threads();
    workers = static_cast<int>(std::min<long>(workers, count));
    if (workers <= 1) {
        for (long i = begin; i < end; ++i) f(i);
        return;
    }
    const long chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        const long lo = begin + t * chunk;
        const long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (long i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace sarqa

#endif
