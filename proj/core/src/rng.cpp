#include "wmsense/rng.hpp"

namespace wmsense {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  std::uint64_t position = 0;
  for (std::uint64_t element : path) {
    ++position;
    h = mix64(h ^ mix64(element + kGolden * position));
  }
  return h;
}

}  // namespace wmsense
