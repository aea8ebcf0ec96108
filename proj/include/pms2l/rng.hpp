#pragma once

#include <cstdint>
#include <random>

namespace pms2l {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates (seed, stream) pairs.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(derive_seed(seed, stream));
}

// Stream tags so that independent consumers of one master seed never share a sequence.
namespace stream {
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t cluster = 2;
inline constexpr std::uint64_t train = 3;
inline constexpr std::uint64_t rademacher = 4;
inline constexpr std::uint64_t stability = 5;
inline constexpr std::uint64_t trial = 6;
inline constexpr std::uint64_t folds = 7;
}  // namespace stream

}  // namespace pms2l
