#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace polybubble {

// Self-contained splitmix64 generator. All sampling in the library flows
// from one explicit seed so repeated runs are bit-identical across
// platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (no cached spare; determinism over speed)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // uniformly distributed direction on S^{n-1}
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double s = 0.0;
        do {
            s = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = normal();
                s += v[i] * v[i];
            }
        } while (s == 0.0);
        const double inv = 1.0 / std::sqrt(s);
        for (int i = 0; i < n; ++i) v[i] *= inv;
        return v;
    }

    // derive an independent stream (for per-task seeding in parallel sweeps)
    Rng fork(std::uint64_t salt) { return Rng(next_u64() ^ (0x9e3779b97f4a7c15ull * (salt + 1))); }

private:
    std::uint64_t state_;
};

}  // namespace polybubble
