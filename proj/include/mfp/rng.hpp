#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mfp {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the named sub-stream `stream`/`index` of `master`. Streams with
/// different names or indices are decorrelated by the splitmix finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char ch : stream) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h) + index);
}

inline Engine make_engine(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0) {
  return Engine(derive_seed(master, stream, index));
}

}  // namespace mfp
