#pragma once

#include <cmath>
#include <cstdint>

namespace marc {

// splitmix64 (Steele/Lea/Vigna). Chosen over std::mt19937 because its output
// sequence is fully pinned by this file, so CSV emissions are reproducible on
// any platform with the same libm.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1), 53-bit resolution
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; second deviate of each pair is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = double((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// One splitmix step used to spread adjacent seeds (per-trial derivation).
inline std::uint64_t mix_seed(std::uint64_t x) {
    SplitMix64 g(x);
    return g.next();
}

}  // namespace marc
