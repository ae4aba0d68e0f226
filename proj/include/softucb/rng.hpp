#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace softucb {

// SplitMix64-style finalizer, used to expand user seeds into well-mixed
// engine seeds and to derive independent substreams.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic substream key for (master seed, index). Substreams derived
// this way do not depend on how much the parent stream has been consumed,
// which keeps parallel fan-out reproducible regardless of scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index * 0xd6e8feb86659fd93ULL + 1));
}

inline std::uint64_t hash_label(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seeded random stream. All scalar draws are produced from raw mt19937_64
// output with explicit arithmetic, so sequences are identical across
// standard libraries (std::*_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_(seed), engine_(mix64(seed)) {}

    std::uint64_t base_seed() const noexcept { return base_; }

    // Independent stream keyed by (base seed, salt); unaffected by draws
    // already made from this stream.
    Rng fork(std::uint64_t salt) const { return Rng(substream_seed(base_, salt)); }
    Rng fork(std::string_view label) const { return fork(hash_label(label)); }

    std::uint64_t next_raw() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = engine_();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);
        return r;
    }

    // Standard normal via Box-Muller; consumes exactly two raw draws.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::uint64_t base_;
    std::mt19937_64 engine_;
};

}  // namespace softucb
