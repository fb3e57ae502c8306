#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chirplock {

// Worker count from CHIRPLOCK_WORKERS, else the hardware concurrency (at least 1).
int default_workers();

// Runs fn(i) for i in [0, count) on up to `workers` threads pulling from a shared
// counter. Jobs must write only to their own slot. If any job throws, the exception
// of the lowest failing index is rethrown after all workers have joined.
template <class F>
void run_indexed(std::size_t count, int workers, F&& fn) {
    if (count == 0) {
        return;
    }
    const auto nthreads =
        static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(count)));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace chirplock
