#pragma once

#include <cstdint>
#include <random>

namespace epf {

/// splitmix64 step; used to derive independent stream seeds from a master
/// seed so results do not depend on how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` derived from `master`. Independent of how many
/// streams exist, so tree prefixes of a larger forest are exact sub-forests.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Unbiased draw from [0, n) by rejection; avoids the implementation-defined
/// behaviour of std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

} // namespace epf
