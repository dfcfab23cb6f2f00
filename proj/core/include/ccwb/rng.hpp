#pragma once

#include <cstdint>
#include <random>

namespace ccwb {

/// splitmix64 step. Used only to derive substream seeds, not as the
/// simulation generator itself.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a substream seed from a master seed and up to three stream tags
/// (sweep point index, run index, purpose). Each distinct tag tuple yields an
/// independent stream, so per-run results do not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t a = 0,
                                 std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t z = splitmix64(s);
    s = z ^ a;
    z = splitmix64(s);
    s = z ^ b;
    z = splitmix64(s);
    s = z ^ c;
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t master,
                                   std::uint64_t a = 0,
                                   std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
    return std::mt19937_64(derive_seed(master, a, b, c));
}

} // namespace ccwb
