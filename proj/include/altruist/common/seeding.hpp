#pragma once

#include <cstdint>

namespace altruist {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent seed for item `index` of stream `stream` under `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(base ^ mix64(stream)) + index);
}

enum SeedStream : std::uint64_t {
  kStreamScenario = 1,
  kStreamActions = 2,
  kStreamInit = 3,
  kStreamReplay = 4,
  kStreamEval = 5,
};

}  // namespace altruist
