#pragma once

#include <cmath>
#include <cstdint>

// Counter-based seeding plus a small xoshiro256++ generator. Every random
// stream in the project is keyed as child = derive(master, tag, ids...), so
// trials, blocks and clocks are independently reproducible and the results
// do not depend on scheduling or on which other streams were consumed.

namespace blpp {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream tags for derived seeds.
enum class Stream : uint64_t {
    Block = 1,     // initial field blocks
    Clock = 2,     // per-block Poisson clocks
    Resample = 3,  // per-block resample draws
    Trial = 4,     // Monte Carlo trials
    Sample = 5,    // misc sampling inside an experiment
};

inline uint64_t derive(uint64_t seed, uint64_t a) {
    uint64_t s = seed;
    splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
    return splitmix64(s);
}
inline uint64_t derive(uint64_t seed, uint64_t a, uint64_t b) {
    return derive(derive(seed, a), b);
}
inline uint64_t derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return derive(derive(seed, a, b), c);
}
inline uint64_t derive(uint64_t seed, Stream tag, int64_t a, int64_t b = 0, int64_t c = 0) {
    return derive(derive(seed, static_cast<uint64_t>(tag), static_cast<uint64_t>(a)),
                  static_cast<uint64_t>(b), static_cast<uint64_t>(c));
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
        has_spare_ = false;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal, Marsaglia polar
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // exponential with the given rate
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next_u64() % n; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_;
};

}  // namespace blpp
