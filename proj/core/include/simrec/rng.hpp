#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace simrec {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Derives an independent stream seed from a base seed and a path of
/// integer tags. The mapping is a splittable hash, so streams for
/// distinct paths are decorrelated and reproducible across runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::mix64(seed + detail::kGolden);
    for (std::uint64_t tag : path) {
        h = detail::mix64(h ^ (tag + detail::kGolden));
    }
    return h;
}

/// Counter-style pseudo-random generator: SplitMix64 stream with
/// Box-Muller normal draws. Deterministic for a given seed, cheap to
/// construct, and each parallel work item owns its own instance.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace simrec
