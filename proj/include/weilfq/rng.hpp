#pragma once

#include <cstdint>

namespace weilfq {

/**
 * Seeded deterministic PRNG (splitmix64).
 *
 * Identical seeds give identical streams on every platform, which keeps
 * sampled verification suites and reports byte-reproducible.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n); n must be nonzero.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Uniform double in [0, 1).
    double unit() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    std::uint64_t state_;
};

}  // namespace weilfq
