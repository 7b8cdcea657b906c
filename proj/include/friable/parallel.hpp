#pragma once

// Deterministic parallel map: work is split by index, results are written to
// per-index slots, and every reduction is done afterwards in index order.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace friable {

void set_thread_count(int n);
int thread_count();

template <class F>
void parallel_for(std::size_t n, F&& f)
{
    const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    const std::size_t used = std::min(workers, n);
    for (std::size_t w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += used)
                    f(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!err)
                    err = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

}  // namespace friable
