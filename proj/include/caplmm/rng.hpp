#pragma once

#include <cstdint>

#include "caplmm/stats.hpp"

namespace caplmm {

/// SplitMix64 finalizer; the project-wide bit mixer for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and up to two labels.
/// All randomness in the project flows from one seed through this function.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
    std::uint64_t k = mix64(master ^ 0x9E3779B97F4A7C15ULL);
    k = mix64(k ^ mix64(a ^ 0xD1B54A32D192ED03ULL));
    k = mix64(k ^ mix64(b ^ 0x8CB92BA72F3D8DD7ULL));
    return k;
}

/// Counter-based uniform/Gaussian stream.
///
/// A (seed, stream) pair keys a SplitMix64 sequence; draws are a pure
/// function of (seed, stream, counter), so identical construction always
/// replays the identical sequence regardless of thread scheduling.
/// Gaussians come from the inverse-CDF transform of the uniform draws.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(derive_seed(seed, stream, 0x5851F42D4C957F2DULL)), counter_(0) {}

    /// Uniform draw strictly inside (0, 1).
    double next_uniform() {
        const std::uint64_t z = next_u64();
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian() { return norm_inv_cdf(next_uniform()); }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace caplmm
