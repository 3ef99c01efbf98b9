#ifndef GRANDRATE_RANDOM_HPP
#define GRANDRATE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace grandrate {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to whiten seeds and to derive substreams.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic substream derivation: every consumer of randomness owns an
// Rng seeded from (master, stream tag) so concurrent sampling never shares state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream ^ 0xa5a5a5a5deadbeefull));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return Rng(derive_seed(master, stream));
}

// FNV-1a over bytes; stable across platforms, used for config hashes and
// per-grid-point seed derivation in sweeps.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace grandrate

#endif
