#pragma once

#include <cstdint>
#include <random>

namespace tenrec {

/// Deterministic random streams.
///
/// Every consumer draws from its own mt19937_64 engine whose seed is a
/// splitmix64 hash of (seed, stream, purpose). The same triple yields the same
/// sequence in every run of the same build, so trials can be generated and
/// replayed independently and in any order. Uniform doubles use the top 53
/// bits of the engine output; Gaussians come from a Box-Muller transform of
/// those uniforms (no libc distribution objects, whose sequences are not
/// pinned by the standard).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (purpose * 0x2545f4914f6cdd1dULL));
}

namespace rng_purpose {
// Purpose tags for stream splitting.
constexpr std::uint64_t core = 1;    // Tucker core entries
constexpr std::uint64_t support = 2; // corruption support selection
constexpr std::uint64_t noise = 3;   // corruption values
constexpr std::uint64_t factor = 16; // factor matrix of mode n uses factor + n
constexpr std::uint64_t trial = 32;  // per-trial seed folding in harnesses
} // namespace rng_purpose

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose)
        : engine_(derive_seed(seed, stream, purpose)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal deviate (Box-Muller, pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace tenrec
