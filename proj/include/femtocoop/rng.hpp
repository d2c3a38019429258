/*
 * Copyright (c) 2026
 *
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef FEMTOCOOP_RNG_HPP
#define FEMTOCOOP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace femtocoop {

/// SplitMix64 finalizer. Used both to derive substream seeds and as a
/// stateless hash for per-link samples.
constexpr std::uint64_t
splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Substream splitting rule: seed of child `index` under `parent` is
/// splitmix64(parent ^ splitmix64(index + tag)). Rounds, fading draws and
/// topology generation each use their own tag so streams never alias.
constexpr std::uint64_t
derive_seed(std::uint64_t parent, std::uint64_t index, std::uint64_t tag = 0) noexcept
{
    return splitmix64(parent ^ splitmix64(index + 0x632be59bd9b4e019ULL * (tag + 1)));
}

namespace stream_tag {
inline constexpr std::uint64_t round = 1;
inline constexpr std::uint64_t topology = 2;
inline constexpr std::uint64_t shadowing = 3;
inline constexpr std::uint64_t fading = 4;
inline constexpr std::uint64_t instance = 5;
} // namespace stream_tag

/// Map 64 random bits to a double in [0, 1).
constexpr double
to_unit(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded random stream. Distributions are implemented here rather than
/// through <random> adaptors so draws are identical across standard
/// library implementations.
class rng_stream
{
  public:
    explicit rng_stream(std::uint64_t seed)
        : engine_(seed)
    {
    }

    double uniform() { return to_unit(engine_()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        // Lemire's rejection keeps the draw unbiased.
        const std::uint64_t threshold = (0 - n) % n;
        for (;;)
        {
            const std::uint64_t r = engine_();
            if (r >= threshold)
                return r % n;
        }
    }

    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Unit-mean exponential.
    double exponential() { return -std::log(1.0 - uniform()); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Standard normal sample that depends only on (seed, a, b). Order of
/// evaluation does not matter, so shadowing can be sampled lazily.
inline double
hashed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    const std::uint64_t h = splitmix64(seed ^ splitmix64(a * 0x100000001b3ULL + b));
    const double u1 = 1.0 - to_unit(h);
    const double u2 = to_unit(splitmix64(h));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace femtocoop

#endif
