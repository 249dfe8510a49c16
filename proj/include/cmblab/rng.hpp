#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cmblab/constants.hpp"

// Deterministic draws on top of the std::mt19937_64 engine. Only the raw
// 64-bit stream of the engine is consumed, so sequences do not depend on
// library-specific distribution implementations.

namespace cmblab::rng {

// Uniform on [0, 1) with 53-bit resolution.
inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1]; never returns zero, safe inside log().
inline double uniform_unit_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via the Box-Muller transform; consumes two draws.
inline double standard_normal(std::mt19937_64& gen) {
  const double u1 = uniform_unit_open(gen);
  const double u2 = uniform_unit(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
}

// Uniform integer in [lo, hi] by modular reduction (bias < 2^-50 for the
// small ranges used here; determinism matters more than perfect uniformity).
inline int uniform_int(std::mt19937_64& gen, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(gen() % span);
}

}  // namespace cmblab::rng
