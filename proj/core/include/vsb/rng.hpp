#ifndef VSB_RNG_HPP
#define VSB_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace vsb {

/// xoshiro256** seeded through splitmix64. Every random decision in the
/// toolkit flows through this generator so runs reproduce bit-for-bit
/// across reruns and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t next_below(uint64_t n);

    /// Standard normal via Box-Muller. Consumes exactly two uniforms.
    double next_gaussian();

    /// In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    uint64_t state_[4];
};

/// Child seed for a named stream: splitmix64 over the base seed xor a
/// FNV-1a hash of the tag. Subcommands and internal stages use distinct
/// tags so they never share a stream.
uint64_t derive_seed(uint64_t base, std::string_view tag);

} // namespace vsb

#endif
