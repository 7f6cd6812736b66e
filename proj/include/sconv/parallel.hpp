#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace sconv {

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads.
///
/// Results land in slot i regardless of which worker computed them, so any
/// reduction done afterwards in index order is independent of the worker
/// count. The first exception thrown by fn is rethrown on the caller thread.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    // optional slots so Result need not be default-constructible
    std::vector<std::optional<Result>> slots(n);
    auto collect = [&] {
        std::vector<Result> results;
        results.reserve(n);
        for (auto& s : slots)
            results.push_back(std::move(*s));
        return results;
    };
    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), std::max<std::size_t>(n, 1)));

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            slots[i].emplace(fn(i));
        return collect();
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return collect();
}

}  // namespace sconv
