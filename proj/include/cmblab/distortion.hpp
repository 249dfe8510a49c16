#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmblab/radiometry.hpp"

// Two-photon-absorption distortion of a blackbody spectrum,
//
//   G(nu) = E(nu) - F(nu),   F(nu) = alpha E(nu/2),
//
// with E the Planck energy density, plus parameter estimation for the
// apparent blackbody temperature and for the (T, alpha) pair.

namespace cmblab::distortion {

using radiometry::SpectralGrid;
using radiometry::SpectrumSamples;
using radiometry::Temperature;

// Blackbody temperature T plus the dimensionless two-photon absorption
// factor alpha in [0, 1).
class DistortionModel {
 public:
  DistortionModel(Temperature temperature, double alpha);
  const Temperature& temperature() const { return temperature_; }
  double alpha() const { return alpha_; }

 private:
  Temperature temperature_;
  double alpha_;
};

// Box constraints for fit_distortion; defaults cover CMB-like use while
// keeping alpha away from the singular alpha -> 1 regime.
struct ParameterBox {
  double t_lo_kelvin = 0.5;
  double t_hi_kelvin = 20.0;
  double alpha_lo = 0.0;
  double alpha_hi = 0.9;
};

struct FitResult {
  Temperature temperature;              // fitted T
  std::optional<double> alpha;          // fitted alpha (two-parameter model only)
  double residual_norm = 0.0;           // weighted root-mean-square residual
  int iterations = 0;
  bool converged = false;
  std::optional<std::vector<double>> covariance_diag;  // per-parameter variance
};

// G(nu_i) sampled on the grid. The half-frequency term is always evaluated
// through the closed-form Planck function, never by interpolating samples.
SpectrumSamples distorted_spectrum(const SpectralGrid& grid, const DistortionModel& model);

// F(nu_i) = alpha E(nu_i / 2) sampled on the grid.
SpectrumSamples deviation_profile(const SpectralGrid& grid, const DistortionModel& model);

// Frequency of the maximum of F over (0, inf); equals twice the Planck peak
// frequency and is independent of alpha.
double peak_deviation_frequency(Temperature temperature);

// Weighted least-squares fit of a pure Planck spectrum. Weights are
// 1/sigma^2 when sigmas are present, 1 otherwise. Deterministic: coarse scan
// of the temperature box followed by golden-section refinement.
FitResult fit_planck_temperature(const SpectrumSamples& samples);
FitResult fit_planck_temperature(const SpectrumSamples& samples, double t_lo_kelvin,
                                 double t_hi_kelvin);

// Weighted least-squares fit of (T, alpha) against G. Deterministic
// multi-start: a fixed 64 x 32 coarse grid over the box, Nelder-Mead
// refinement from the best cell, and the alpha = 0 profile fit as an extra
// candidate; the best objective wins, ties broken by lower T then lower
// alpha. Throws std::domain_error for degenerate (constant) data.
FitResult fit_distortion(const SpectrumSamples& samples, const ParameterBox& box = {});

// Synthetic observation of G with multiplicative Gaussian noise,
//   values_i = G(nu_i) (1 + noise_rel z_i),  sigmas_i = noise_rel G(nu_i),
// where z_i are standard normal draws from mt19937_64 seeded with `seed`
// (Box-Muller, see rng.hpp). noise_rel = 0 reproduces distorted_spectrum
// exactly, with sigmas omitted so downstream weighting stays finite.
SpectrumSamples synthesize_observation(const DistortionModel& model, const SpectralGrid& grid,
                                       double noise_rel, std::uint64_t seed);

}  // namespace cmblab::distortion
