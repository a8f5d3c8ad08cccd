#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fairpost {

// Seeded RNG with self-contained bounded sampling. std::mt19937_64 output is
// fixed by the standard; std::uniform_int_distribution is not, so bounded
// draws use rejection sampling to keep results identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (deterministic, no cached spare).
    double next_gaussian();

    // Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<std::size_t> permutation(std::size_t n);

    // k distinct values from {0, ..., n-1}, uniform without replacement.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

}  // namespace fairpost
