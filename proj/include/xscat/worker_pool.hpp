#pragma once
#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace xscat {

// Runs fn(0..n_items) across `workers` threads. Items must write only to
// their own pre-allocated output slots; any reduction happens afterwards in
// item order, which keeps results independent of the thread schedule. The
// first exception thrown by a worker is rethrown on the calling thread.
inline void parallel_for(std::size_t n_items, int workers,
                         const std::function<void(std::size_t)>& fn)
{
    if (n_items == 0)
        return;
    workers = std::max(1, workers);
    if (workers == 1 || n_items == 1) {
        for (std::size_t i = 0; i < n_items; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_items || failed.load(std::memory_order_relaxed))
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = static_cast<int>(std::min<std::size_t>(workers, n_items));
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t)
        threads.emplace_back(body);
    for (auto& t : threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace xscat
