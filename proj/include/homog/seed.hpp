#pragma once

#include <cstdint>

namespace homog {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable derived seed for sub-stream `tag` of `seed`. Distinct tags give
/// statistically independent streams.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    return mix64(mix64(seed) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

} // namespace homog
