#pragma once

#include <cstdint>

namespace specflow {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so parallel substreams are reproducible by index regardless of
// worker count.  SplitMix64 finalizer over a Weyl sequence.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(seed ^ (stream * 0x9E3779B97F4A7C15ull) ^ 0xD1B54A32D192ED03ull)) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(base_ + counter * 0x9E3779B97F4A7C15ull);
    }

    // Uniform in [0,1).
    double uniform(std::uint64_t counter) const {
        return double(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    std::uint64_t integer(std::uint64_t counter, std::uint64_t bound) const {
        return bits(counter) % bound;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
};

}  // namespace specflow
