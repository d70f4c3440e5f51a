#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace attribkit::parallel {

/// Applies fn(i) for i in [0, n) using `workers` threads and returns the
/// results in index order. Units must be independent; output is identical
/// for any worker count.
template <typename Result>
std::vector<Result> ordered_map(std::size_t n, int workers,
                                const std::function<Result(std::size_t)>& fn) {
    std::vector<Result> results(n);
    if (n == 0) return results;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    const int count = std::min<int>(workers, static_cast<int>(n));
    threads.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace attribkit::parallel
