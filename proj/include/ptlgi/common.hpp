#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ptlgi {

// Numerical failure modes surfaced by the library. Domain/contract violations
// use std::domain_error / std::invalid_argument directly.
struct stiffness_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct evolution_degenerate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct postselect_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct inconsistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;

// Portable uniform double in [0,1) from the top 53 bits; avoids
// implementation-defined std::uniform_real_distribution sequences.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Runs fn(i) for i in [0,n). jobs<=1 runs inline; otherwise a fixed pool
// pulls indices from an atomic counter. Results must be written to
// per-index slots by the caller so the outcome is order-independent.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(jobs, n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline unsigned default_jobs() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
}

}  // namespace ptlgi
