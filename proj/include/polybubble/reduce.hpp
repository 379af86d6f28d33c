#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace polybubble {

// Pairwise summation: the reduction order is a fixed binary tree over the
// index range, so results do not depend on chunking or thread count.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

// Evaluate f(i) for i in [0,n) into an ordered buffer, optionally on
// several threads. Output order is independent of the thread count.
inline std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f, int threads = 1) {
    std::vector<double> out(n);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += nt) out[i] = f(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

inline double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& f, int threads = 1) {
    const std::vector<double> terms = parallel_map(n, f, threads);
    return pairwise_sum(terms);
}

}  // namespace polybubble
