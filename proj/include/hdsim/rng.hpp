#ifndef HDSIM_RNG_HPP
#define HDSIM_RNG_HPP

#include <cstdint>
#include <random>

#include "hdsim/time.hpp"

namespace hdsim {

/// splitmix64 step; used to derive independent stream seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Mix a base seed with stream indices so every entity gets its own stream.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(base ^ 0x243f6a8885a308d3ull) ^ splitmix64(a * 0x100000001b3ull + b));
}

/// Deterministic RNG wrapper. All draws go through explicit helpers so results
/// do not depend on the standard library's distribution implementations.
class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0. Rejection-free modulo of a
    /// 64-bit draw; bias is negligible for the small ranges used here.
    std::uint64_t uniform_u64(std::uint64_t n) { return engine_() % n; }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(uniform_u64(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Uniform tick count in [range.min, range.max] inclusive.
    Time uniform_time(TimeRange range) {
        return Time{uniform_int(range.min.ticks, range.max.ticks)};
    }

    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace hdsim

#endif
