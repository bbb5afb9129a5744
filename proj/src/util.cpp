#include "qcm/util.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace qcm {

namespace {
int g_max_threads = 1;
}

int max_threads() { return g_max_threads; }

void set_max_threads(int n) { g_max_threads = n < 1 ? 1 : n; }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    const int workers = std::min<size_t>(static_cast<size_t>(g_max_threads), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (std::thread& t : pool) t.join();
}

}  // namespace qcm
