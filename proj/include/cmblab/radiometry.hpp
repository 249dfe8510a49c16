#pragma once

#include <cstddef>
#include <optional>
#include <vector>

// Closed-form blackbody radiometry: Planck spectral energy density per unit
// frequency, its peak location, and the total photon number density.

namespace cmblab::radiometry {

// Thermodynamic temperature. Non-negative by construction; spectral
// evaluations additionally require a strictly positive value.
class Temperature {
 public:
  explicit Temperature(double kelvin);
  double kelvin() const { return kelvin_; }

 private:
  double kelvin_;
};

// Strictly increasing, strictly positive frequency axis in Hz.
class SpectralGrid {
 public:
  explicit SpectralGrid(std::vector<double> frequencies_hz);

  // Linearly spaced grid with n >= 2 points, lo < hi, both in Hz.
  static SpectralGrid linear(double lo_hz, double hi_hz, std::size_t n);

  const std::vector<double>& frequencies() const { return frequencies_; }
  std::size_t size() const { return frequencies_.size(); }
  double operator[](std::size_t i) const { return frequencies_[i]; }

 private:
  std::vector<double> frequencies_;
};

// A sampled spectrum on a grid: intensity values in J m^-3 Hz^-1 with
// optional per-sample 1-sigma uncertainties in the same units.
struct SpectrumSamples {
  SpectralGrid grid;
  std::vector<double> values;
  std::optional<std::vector<double>> sigmas;

  SpectrumSamples(SpectralGrid grid, std::vector<double> values,
                  std::optional<std::vector<double>> sigmas = std::nullopt);
};

// Planck spectral energy density u(nu, T) = (8 pi h / c^3) nu^3 / (e^x - 1),
// x = h nu / (k_B T), in J m^-3 Hz^-1. Throws std::domain_error unless
// nu > 0 and T > 0.
double planck_energy_density(double nu_hz, Temperature temperature);

// Frequency of the maximum of planck_energy_density,
// nu_p = x* k_B T / h with x* the positive root of x = 3 (1 - e^{-x}).
double planck_peak_frequency(Temperature temperature);

// Positive root of x = 3 (1 - e^{-x}), solved once by Newton iteration.
double planck_peak_x();

// Total photon number density n_gamma(T) in m^-3, evaluated by composite
// Gauss-Legendre quadrature of x^2 / (e^x - 1) on [0, 50] after the
// substitution x = h nu / (k_B T). Equals 16 pi zeta(3) (k_B T / (h c))^3;
// that closed form is deliberately left to the tests as a cross-check.
// T = 0 returns 0.
double photon_number_density(Temperature temperature);

}  // namespace cmblab::radiometry
