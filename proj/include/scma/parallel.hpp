#pragma once

#include <cstdint>
#include <exception>
#include <vector>

namespace scma {

/// Threads OpenMP would use by default.
int available_workers();

/// Reference loop: trial results in index order, one thread.
template <class T, class Fn>
std::vector<T> run_trials_serial(std::int64_t n, Fn&& fn) {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t) out.push_back(fn(t));
    return out;
}

/// Same results as run_trials_serial for any worker count: each trial
/// writes its own slot, so completion order does not matter. `fn` must
/// derive all randomness from the trial index.
template <class T, class Fn>
std::vector<T> run_trials(std::int64_t n, int workers, Fn&& fn) {
    if (workers <= 1) return run_trials_serial<T>(n, fn);
    std::vector<T> out(static_cast<std::size_t>(n));
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (std::int64_t t = 0; t < n; ++t) {
        try {
            out[static_cast<std::size_t>(t)] = fn(t);
        } catch (...) {
#pragma omp critical(scma_trial_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace scma
