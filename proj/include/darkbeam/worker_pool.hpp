#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace darkbeam {

/// Worker count: hardware concurrency capped by DARKBEAM_THREADS.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("DARKBEAM_THREADS")) {
        try {
            const long v = std::stol(cap);
            if (v >= 1) {
                n = std::min<unsigned>(n, unsigned(v));
            }
        } catch (const std::exception&) {
            // An unparsable cap is ignored.
        }
    }
    return n;
}

/**
 * Evaluates fn(0..count-1) on up to `workers` threads. Results land in
 * index order, so the output does not depend on scheduling. The exception
 * of the lowest failing index is rethrown.
 */
template <typename T>
std::vector<T> parallel_map(std::size_t count,
                            const std::function<T(std::size_t)>& fn,
                            unsigned workers = worker_count())
{
    std::vector<T> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, unsigned(count)));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> team;
        for (unsigned k = 0; k < n; ++k) {
            team.emplace_back(work);
        }
        for (auto& t : team) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

} // namespace darkbeam
