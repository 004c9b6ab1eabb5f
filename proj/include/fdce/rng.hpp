#ifndef FDCE_RNG_HPP
#define FDCE_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fdce {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed path, e.g. (master, point, trial).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto v : path) h = splitmix64(h ^ splitmix64(v));
    return h;
}

/// Independent generator streams drawn from one trial seed.
enum class Stream : std::uint64_t { h_ba = 1, h_aa, aoa, symbols_a, symbols_b, noise };

inline Rng make_stream(std::uint64_t trial_seed, Stream s) {
    return Rng(derive_seed({trial_seed, static_cast<std::uint64_t>(s)}));
}

}  // namespace fdce

#endif  // FDCE_RNG_HPP
