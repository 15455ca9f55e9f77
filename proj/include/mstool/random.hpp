#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mstool {

using Rng = std::mt19937_64;

// Seeds an engine from a (seed, stream) pair so that independent work items
// (restarts, subjects) get decorrelated streams regardless of scheduling.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// Unbiased draw from [0, n). Written out rather than using
// std::uniform_int_distribution, whose output is library-specific; golden
// files depend on this sequence.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

// Fisher-Yates with uniform_index; same portability reason as above.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace mstool
