#pragma once

// Physical and mathematical constants used throughout the library.
// Every module takes h, k_B and c from here so that numeric results are
// reproducible bit-for-bit between runs and between modules.

namespace cmblab::constants {

// CODATA 2018 defining constants (exact by definition of the SI).
inline constexpr double planck_h = 6.62607015e-34;     // J s
inline constexpr double boltzmann_k = 1.380649e-23;    // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s

inline constexpr double pi = 3.14159265358979323846;

// Apery's constant zeta(3), used by the closed-form photon number density.
inline constexpr double zeta3 = 1.2020569031595942854;

}  // namespace cmblab::constants
