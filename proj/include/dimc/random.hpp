#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dimc {

/// SplitMix64 finalizer step; advances `state`.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: hashes an ordered tuple of indices into a
/// 64-bit seed. Streams for distinct tuples are independent of the order in
/// which they are requested.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t state = 0x6a09e667f3bcc909ULL;
    std::uint64_t h = 0;
    for (auto p : parts)
    {
        state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        h = splitmix64(state);
    }
    return h;
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator; four words
/// of state make per-trial seeding cheap.
class Rng
{
  public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& w : s_)
            w = splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept
    {
        std::uint64_t const result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t const t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    //! Uniform double in [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    //! Uniform double in (0, 1].
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    //! Standard normal variate (polar Box-Muller, no cached pair).
    double normal() noexcept
    {
        double u, v, s;
        do
        {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
};

}  // namespace dimc
