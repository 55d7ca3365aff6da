#include "prnu/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace prnu {

namespace {
std::atomic<int> g_default_threads{0};
}

int set_default_thread_count(int threads) {
    return g_default_threads.exchange(threads);
}

void parallel_for(int count, const std::function<void(int)>& fn, int threads) {
    if (count <= 0) return;
    if (threads == 0) threads = g_default_threads.load();
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace prnu
