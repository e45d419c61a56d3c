#ifndef VCONS_PARALLEL_HPP
#define VCONS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vcons
{

/// Default worker count: $VCONS_JOBS when set to a positive integer,
/// otherwise the hardware concurrency.
unsigned default_jobs();

/// Calls body(k) for k in [0, count) on up to `jobs` threads. Tasks are
/// handed out dynamically; callers write results into pre-sized slots so
/// output order never depends on scheduling. The first exception thrown by
/// any task is rethrown after all workers stop.
template<class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body)
{
    if(jobs <= 1 || count <= 1) {
        for(std::size_t k = 0; k < count; ++k) {
            body(k);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for(std::size_t k = next++; k < count; k = next++) {
            try {
                body(k);
            }
            catch(...) {
                std::lock_guard lock(failure_mutex);
                if(!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(jobs, count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for(std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back(worker);
        }
    }
    if(failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace vcons

#endif
