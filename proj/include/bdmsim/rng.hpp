#pragma once

#include <cstdint>
#include <stdexcept>

namespace bdmsim {

// Deterministic 64-bit generator (splitmix64). Every station gets its own
// stream plus one dedicated stream for channel error draws, all derived from
// the scenario seed, so adding a station never perturbs the draw sequences
// of the others. The output is a pure function of (seed, stream_id, call
// index) and does not depend on platform or standard-library internals.
class RngStream {
public:
    RngStream() : RngStream(1, 0) {}

    RngStream(uint64_t seed, uint32_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (uint64_t(stream_id) + 1));
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n). Rejection sampling keeps the distribution
    // exact for every n, not just powers of two.
    uint64_t next_uniform(uint64_t n) {
        if (n == 0) throw std::invalid_argument("RngStream::next_uniform: n must be >= 1");
        if (n == 1) return 0;
        const uint64_t max = ~uint64_t(0);
        const uint64_t limit = max - max % n;  // multiple of n
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    uint64_t seed() const { return seed_; }
    uint32_t stream_id() const { return stream_id_; }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
    uint32_t stream_id_;
    uint64_t state_;
};

}  // namespace bdmsim
