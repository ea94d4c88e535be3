#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace jamloc {

// All randomness in the simulator goes through this wrapper instead of the
// std distributions, whose output is implementation-defined. mt19937_64 is
// bit-exact everywhere, and the samplers below are hand-rolled so the same
// seed reproduces the same stream on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % n;
    }

    // Box-Muller, always consuming exactly two uniforms (no cached spare,
    // so the stream position is a pure function of the call count).
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives decorrelated child seeds from a base seed and up to two stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t state = base;
    std::uint64_t z = splitmix64(state);
    state ^= tag_a * 0xD1B54A32D192ED03ULL;
    z ^= splitmix64(state);
    state ^= tag_b * 0x8CB92BA72F3D8DD7ULL;
    z ^= splitmix64(state);
    return z;
}

}  // namespace jamloc
