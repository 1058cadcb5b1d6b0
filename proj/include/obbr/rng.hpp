#pragma once

// Portable seeded randomness.
//
// Every random decision is drawn from a stream derived from
// (seed, sample id, purpose), so per-sample outcomes do not depend on the
// order in which samples are visited. The generator is SplitMix64; bounded
// integers use rejection sampling and reals use the top 53 bits, so results
// are identical on every platform and standard library.

#include <cstdint>
#include <string_view>

#include "obbr/text.hpp"

namespace obbr {

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        return mix(z);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). `bound` must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform real in [0, 1).
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform real in (0, 1].
    double uniform_open0() noexcept { return 1.0 - uniform(); }

private:
    std::uint64_t state_;
};

/// Derives an independent stream for one (seed, key, purpose) triple.
inline SplitMix64 stream_for(std::uint64_t seed, std::string_view key, std::string_view purpose) {
    std::uint64_t h = SplitMix64::mix(seed ^ 0x6a09e667f3bcc909ULL);
    h = SplitMix64::mix(h ^ text::fnv1a64(key));
    h = SplitMix64::mix(h ^ text::fnv1a64(purpose));
    return SplitMix64(h);
}

/// Stable sort key used for seeded selection without replacement.
inline std::uint64_t selection_key(std::uint64_t seed, std::string_view key, std::string_view purpose) {
    return stream_for(seed, key, purpose)();
}

} // namespace obbr
