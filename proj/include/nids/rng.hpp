#pragma once

#include <cstdint>
#include <string_view>

namespace nids {

// Counter-based pseudo-random generator (SplitMix64 finalizer over a keyed
// counter). The output stream is a pure function of (seed, draw index), and
// child generators are pure functions of (seed, label), so per-layer and
// per-epoch streams do not depend on how much randomness other components
// consumed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix(key_ + counter_ * 0x9e3779b97f4a7c15ull);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n). Rejection sampling keeps the result exact
    // and identical on every platform.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0)
            return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % n;
        }
    }

    // Standard normal deviate (Box-Muller, always consumes two draws).
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) // exclude log(0)
            u1 = next_double();
        return norm_from(u1, u2);
    }

    // Independent stream keyed by a string label.
    Rng child(std::string_view label) const {
        Rng c(0);
        c.key_ = mix(key_ ^ fnv1a(label));
        c.counter_ = 0;
        return c;
    }

    // Independent stream keyed by an index.
    Rng child(std::uint64_t index) const {
        Rng c(0);
        c.key_ = mix(key_ ^ mix(index ^ 0xb5297a4d3f84d5b5ull));
        c.counter_ = 0;
        return c;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    static double norm_from(double u1, double u2);

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace nids
