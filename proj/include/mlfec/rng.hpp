#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mlfec::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer; bijective on 64-bit words.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Derives a child stream seed from (seed, index). Injective in the index
/// for a fixed seed. Simulation streams are keyed as
/// derive(derive(master_seed, snr_index), frame_index), which decouples
/// frames from each other and from the worker that happens to run them.
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed + (index + 1) * kGamma);
}

/// Counter-based generator (splitmix64). Gaussians come from Box-Muller on
/// two uniforms, so a stream's output is a pure function of its seed and is
/// identical across reruns regardless of threading.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGamma;
        return mix64(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform k-bit value, k in [1, 64].
    std::uint64_t next_bits(int k) noexcept { return next_u64() >> (64 - k); }

    double next_gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_unit();  // (0, 1]; keeps log() finite
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mlfec::rng
