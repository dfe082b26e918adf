#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rise {

// Reproducible random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all derived variates (uniform reals,
// bounded integers, normals) are computed here rather than through the
// implementation-defined std distributions, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the Box-Muller transform.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 mix of (seed, stream); used to derive independent sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rise
