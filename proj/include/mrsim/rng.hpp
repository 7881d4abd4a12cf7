#pragma once

#include <cstdint>

namespace mrsim {

// SplitMix64. Chosen over std:: engines because its output is fully pinned by
// the reference algorithm, so traces replay bit-exactly on any platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

/// One stateless hash step of SplitMix64 (finalizer over a single value).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stream-splitting rule: every consumer of randomness derives its own seed
// from (master, purpose, index). Adding robots or streams never perturbs
// the draws of existing ones.
enum class StreamPurpose : std::uint64_t {
    AttractorPlacement = 1,
    RobotWander = 2,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                    std::uint64_t index = 0) {
    return mix64(mix64(master ^ static_cast<std::uint64_t>(purpose) * 0xD2B74407B1CE6E93ull) ^ index);
}

/// Counter-addressed uniform in [0,1): value k of the stream named by `seed`.
inline double stream_unit(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(mix64(seed ^ mix64(counter)) >> 11) * 0x1.0p-53;
}

}  // namespace mrsim
