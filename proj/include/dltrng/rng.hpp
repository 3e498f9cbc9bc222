#pragma once

// Counter-based keyed randomness. Every random quantity in the simulator is
// a pure function of (seed, key words); there is no sequential generator
// state, so reads are reproducible regardless of order or parallelism.

#include <cstdint>

namespace dltrng {

// SplitMix64 finalizer; full 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t k0) {
    return mix64((seed + kGolden) ^ mix64(k0 + kGolden));
}

constexpr std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1) {
    return mix64(keyed_u64(seed, k0) + mix64(k1 + 2 * kGolden));
}

constexpr std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1,
                                  std::uint64_t k2) {
    return mix64(keyed_u64(seed, k0, k1) + mix64(k2 + 3 * kGolden));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) {
    return double(x >> 11) * 0x1.0p-53;
}

/// Deterministic stream of draws under a fixed key, for the rare places
/// that need more than one variate per key (e.g. rejection sampling).
class KeyedStream {
public:
    explicit KeyedStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() { return mix64(state_ + (++counter_) * kGolden); }
    double next_unit() { return to_unit(next_u64()); }

private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

}  // namespace dltrng
