#pragma once

#include <cstdint>
#include <random>

namespace disttack {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, stream id); streams do not shift when more are added.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

// Stream ids used across the library, so distinct consumers never share a stream.
namespace stream {
inline constexpr std::uint64_t sbm_edges = 0x5b3e;
inline constexpr std::uint64_t sbm_features = 0x5b3f;
inline constexpr std::uint64_t sbm_splits = 0x5b40;
inline constexpr std::uint64_t partition = 0x9a27;
inline constexpr std::uint64_t init = 0x1417;
inline constexpr std::uint64_t surrogate = 0x5022;
inline constexpr std::uint64_t baseline = 0xba5e;
inline constexpr std::uint64_t targets = 0x7a76;
inline constexpr std::uint64_t worker_base = 0x10000;
}  // namespace stream

}  // namespace disttack
