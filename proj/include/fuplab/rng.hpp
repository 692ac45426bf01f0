#pragma once
#include <cmath>
#include <cstdint>
#include <string>

namespace fuplab {

// splitmix64: tiny, fast, and good enough statistically for Monte Carlo
// sampling here (validated downstream by the chi-square harness).
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit mantissa
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1] — safe as a log() argument
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Box-Muller; one value per call, second is discarded to keep substream
    // arithmetic trivial to reason about.
    double gaussian() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }
};

// FNV-1a over the name, mixed with the seed.  Named substreams keep every
// sampler independent of evaluation order and thread count.
inline uint64_t substream(uint64_t seed, const std::string& name) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    // one splitmix round so adjacent seeds do not give adjacent states
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

inline uint64_t substream(uint64_t seed, const std::string& name, uint64_t index) {
    return substream(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)), name);
}

} // namespace fuplab
