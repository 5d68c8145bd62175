#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace semimarkov {

// Worker cap: SEMIMARKOV_THREADS if set (minimum 1), else the hardware count.
inline unsigned max_threads() {
    if (const char* env = std::getenv("SEMIMARKOV_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace detail {
inline thread_local bool in_parallel_region = false;
}

// Runs f(i) for i in [0, n). Work items must be independent; results should
// be written to pre-sized slots so the outcome does not depend on
// scheduling. Nested calls degrade to serial execution.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    unsigned workers = max_threads();
    if (n <= 1 || workers <= 1 || detail::in_parallel_region) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex err_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            detail::in_parallel_region = true;
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) break;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace semimarkov
