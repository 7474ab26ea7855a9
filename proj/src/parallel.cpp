#include "sarqa/parallel.hpp"

#include <atomic>

namespace sarqa {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) {
    g_max_threads.store(n < 0 ? 0 : n);
}

int max_threads() {
    int n = g_max_threads.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n < 1 ? 1 : n;
}

} // namespace sarqa
