#pragma once

#include <cstdint>

namespace sdc::detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-keyed stream: each (seed, iteration, sample) triple owns an
// independent sequence, so Monte Carlo samples can be drawn in any order.
class SampleStream
{
public:
    constexpr SampleStream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t sample)
        : state_(mix64(mix64(mix64(seed) ^ iteration) ^ sample))
    {
    }

    constexpr std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    constexpr double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [-half_width, half_width).
    constexpr double symmetric(double half_width) { return half_width * (2.0 * unit() - 1.0); }

private:
    std::uint64_t state_;
};

} // namespace sdc::detail
