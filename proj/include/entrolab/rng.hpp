#pragma once

// Deterministic RNG with portable draw semantics. std::uniform_*_distribution
// is implementation-defined, so draws are derived from raw 64-bit output.

#include <cstdint>
#include <vector>

namespace entrolab {

// splitmix64, used both standalone and to seed larger state.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed = 0) : state(seed + 0x9e3779b97f4a7c15ULL) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64 and draws stay portable
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<uint64_t>(m >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }
};

}  // namespace entrolab
