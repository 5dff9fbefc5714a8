#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace henstock_ode {

/// Worker count for inner loops. HENSTOCK_ODE_THREADS caps it; 0 or unset
/// means hardware concurrency.
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HENSTOCK_ODE_THREADS")) {
        try {
            const long requested = std::stol(env);
            if (requested > 0) return static_cast<unsigned>(std::min<long>(requested, hw));
        } catch (const std::exception&) {
            // unparsable value: fall back to auto
        }
    }
    return hw;
}

/// Runs body(i) for i in [0, n). Each index is touched by exactly one worker,
/// so results written per index do not depend on the schedule. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 4096) {
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(n, lo + chunk);
                try {
                    for (std::size_t i = lo; i < hi; ++i) body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace henstock_ode
