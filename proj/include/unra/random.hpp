#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace unra {

// Combines a base seed with stream identifiers into an independent sub-seed.
// Uses the SplitMix64 finalizer so that nearby inputs give unrelated outputs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the helpers below avoid the
// implementation-defined std distributions so that draws are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n). Requires n > 0.
  std::uint64_t index(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace unra
