#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace piecevec {

// splitmix64: stateless 64-bit mixer. Used wherever a value has to be
// derived deterministically from a (seed, key) pair without carrying RNG
// state around (per-game seeds, per-position move choices).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic RNG facade. std::mt19937_64 output is fully specified by
// the standard, so sequences are bit-stable across platforms; the mappings
// below avoid std::uniform_*_distribution, whose output is not.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1): top 53 bits scaled, the usual double construction
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n); rejection sampling, no modulo bias
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Fisher-Yates with the portable draws above
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace piecevec
