#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dacs {

// Stream ids keep derived seeds disjoint across unrelated uses.
enum class Stream : std::uint64_t {
  kJitter = 1,
  kMcReward = 2,
  kCoupling = 3,
  kRounding = 4,
  kSharpeRounding = 5,
  kSimulate = 6,
  kBaseline = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed that depends only on (master, stream, a, b, c); identical under any
// thread schedule.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(master ^ 0x8824a3d7d1563a4dULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t master, Stream stream,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  return std::mt19937_64(derive_seed(master, stream, a, b, c));
}

// Uniform draw from the binary vectors of length t with `ones` ones.
std::vector<std::uint8_t> sample_membership(int t, int ones,
                                            std::mt19937_64& rng);

}  // namespace dacs
