#pragma once

#include <cstdint>
#include <string_view>

namespace flashkit {

// splitmix64 (Steele, Lea, Flood 2014). Single 64-bit word of state, one
// multiply-xorshift chain per output. Every random draw in the toolkit flows
// through this generator so corpora are reproducible across platforms.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], inclusive. Modulo bias is < 2^-50 for the
    // small ranges used here (rates, channels, flags).
    std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }

    bool next_bool() { return (next() & 1ull) != 0; }

    std::uint8_t next_byte() { return static_cast<std::uint8_t>(next_range(0, 255)); }
};

inline std::uint64_t splitmix64_mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Per-item seed for item `index` of a seeded stream: the splitmix gamma walk.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    return seed + 0x9E3779B97F4A7C15ull * (index + 1);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Stage sub-seed: one master seed fans out to independently reproducible stages.
inline std::uint64_t derive_stage_seed(std::uint64_t seed, std::string_view stage_tag) {
    return splitmix64_mix(seed ^ fnv1a64(stage_tag));
}

}  // namespace flashkit
