#ifndef QSAT_RNG_HPP
#define QSAT_RNG_HPP

#include <cstdint>

namespace qsat {

// SplitMix64, used for seeding and for deriving per-run streams.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman/Vigna). Small, fast, and bit-reproducible across
// platforms, which std::uniform_int_distribution is not.
class Rng {
public:
    Rng() : Rng(0) {}

    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    // Independent stream for run `index` under a master seed. Every run of a
    // Monte Carlo batch derives its generator this way, so results do not
    // depend on scheduling or worker count.
    static Rng for_run(uint64_t master_seed, uint64_t index) {
        SplitMix64 sm(master_seed ^ (0xA0761D6478BD642Full * (index + 1)));
        return Rng(sm.next());
    }

    uint64_t next() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n), n >= 1. Classic modulo rejection.
    uint64_t next_below(uint64_t n) {
        uint64_t threshold = (-n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t s_[4];
};

} // namespace qsat

#endif
