#pragma once

#include <cstdint>
#include <random>

namespace bemap {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-(seed, epoch, node) stream; lets samplers run in
// parallel across nodes while staying reproducible.
inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint64_t epoch,
                                     std::uint64_t node) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(epoch + 0x1000000000000001ULL));
    s = splitmix64(s ^ splitmix64(node + 0x2000000000000003ULL));
    return std::mt19937_64(s);
}

}  // namespace bemap
