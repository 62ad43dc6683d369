#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracture::par {

/// Global switch between the OpenMP kernels and the serial reference path.
/// Both paths use the same fixed chunking, so results are bitwise identical
/// and independent of the thread count.
bool enabled();
void set_enabled(bool on);

inline constexpr std::size_t kChunk = 2048;

namespace detail {
template <class F>
double chunk_sum(std::size_t begin, std::size_t end, F&& term) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
}
}  // namespace detail

/// Deterministic chunked reduction of term(0) + ... + term(n-1).
template <class F>
double sum_serial(std::size_t n, F&& term) {
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    double total = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t b = c * kChunk;
        total += detail::chunk_sum(b, std::min(n, b + kChunk), term);
    }
    return total;
}

template <class F>
double sum(std::size_t n, F&& term) {
    if (!enabled() || n < 2 * kChunk) return sum_serial(n, term);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
        const std::size_t b = static_cast<std::size_t>(c) * kChunk;
        partial[static_cast<std::size_t>(c)] = detail::chunk_sum(b, std::min(n, b + kChunk), term);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

/// Order-independent elementwise loop.
template <class F>
void for_each(std::size_t n, F&& body) {
    if (!enabled()) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
}

}  // namespace fracture::par
