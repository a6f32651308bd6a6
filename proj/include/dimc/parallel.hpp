#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dimc {

/// Resolves a worker-count setting; 0 means machine parallelism.
inline unsigned resolve_workers(unsigned requested) noexcept
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls `fn(i)` for every i in [0, count) on up to `workers` threads.
/// Work items are claimed dynamically; callers write results into
/// per-index slots so the outcome does not depend on scheduling.
template<class F>
void parallel_for(std::size_t count, unsigned workers, F&& fn)
{
    workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace dimc
