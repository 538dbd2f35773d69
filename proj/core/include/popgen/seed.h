/**
 * @file seed.h
 * @brief Deterministic sub-seed derivation.
 */

#ifndef POPGEN_SEED_H
#define POPGEN_SEED_H

#include <cstdint>

namespace popgen {

/// splitmix64 finalizer.
constexpr uint64_t mix_seed(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream for (stage, index) under a parent seed.
constexpr uint64_t derive_seed(uint64_t parent, uint64_t stage, uint64_t index = 0) {
  return mix_seed(mix_seed(parent ^ mix_seed(stage)) + index);
}

/// Stage labels used with derive_seed.
enum class SeedStage : uint64_t {
  Lead = 1,
  Secondary = 2,
  Harmonic = 3,
  ColumnChords = 4,
  Quantize = 5,
  Layer = 6,
};

constexpr uint64_t derive_seed(uint64_t parent, SeedStage stage, uint64_t index = 0) {
  return derive_seed(parent, static_cast<uint64_t>(stage), index);
}

}  // namespace popgen

#endif  // POPGEN_SEED_H
