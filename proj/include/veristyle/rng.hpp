#pragma once

#include <cstdint>
#include <random>

namespace veristyle {

// splitmix64; used to derive independent child seeds from a master seed so
// that parallel units (trees, folds, columns, restarts) stay deterministic
// under any worker count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t unit) {
    return splitmix64(master ^ splitmix64(unit + 0x51ed2701ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

}
