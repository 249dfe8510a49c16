#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Regularized double time integrals for a two-photon transition amplitude,
// in units hbar = c = 1. With f(t) = exp[i (E_f - omega) t] switched on at
// t = 0 and g(t') = exp[-i (E_i + omega') t'], the amplitude is
//
//   A = integral_0^inf dt e^{-eps t} f(t) * (inner integral over t'),
//
// where the inner integral runs over t' <= t - rho (retarded, regulator
// e^{+eta t'}) or t' >= t + rho (advanced, regulator e^{-eta t'}).
//
// Writing b = E_i + omega' and Delta = E_f - E_i - omega - omega', both
// integrals are elementary:
//
//   retarded:  A = e^{-(eta - i b) rho} / [ (eta - i b) ((eps - eta) - i Delta) ]
//   advanced:  A = e^{-(eta + i b) rho} / [ (eta + i b) ((eps + eta) - i Delta) ]
//
// (hand-derived from the two nested exponential integrals; the numeric mode
// cross-checks them by outer quadrature). The retarded magnitude is a
// Lorentzian in Delta of half-width eps - eta whose peak grows like
// 1/(eps - eta), i.e. the energy-conservation peak sharpening into a delta
// function as the regulators are removed.
//
// The signal-linked variant constrains the inner integral to [0, t - rho],
// which is empty for t < rho; its amplitude over an outer window [0, t_max]
// is therefore exactly zero once rho > t_max. The EPR variant instead runs
// the inner integral over (-inf, t] independently of rho.

namespace cmblab::arrow {

using Complex = std::complex<double>;

struct TransitionConfig {
  double energy_initial = 1.0;
  double energy_final = 1.75;
  double omega = 0.4;
  double omega_prime = 0.35;
  double rho = 0.0;      // spatial separation |r - r'|
  double epsilon = 1e-2; // outer regulator, > eta
  double eta = 5e-3;     // inner regulator, in (0, epsilon)
  double t_max = 5000.0; // outer window for the numeric mode

  double detuning() const { return energy_final - energy_initial - omega - omega_prime; }

  // Same configuration with energy_final shifted so detuning() == delta.
  TransitionConfig with_detuning(double delta) const;

  // Throws std::domain_error on invalid regulators (eta >= epsilon, either
  // non-positive), rho < 0, or t_max <= 0.
  void validate() const;
};

enum class EvalMode { analytic, numeric };

enum class ScanVariant { retarded, advanced, signal_linked };

struct AmplitudeScan {
  std::vector<double> deltas;
  std::vector<double> magnitudes;
  double peak_delta = 0.0;
  double peak_magnitude = 0.0;
  // Half distance between the two detunings where the magnitude has fallen
  // by sqrt(2) from the peak (linear interpolation between scan points);
  // NaN when the scan window is too narrow to bracket both crossings.
  double half_width = 0.0;
};

// Retarded amplitude. Numeric mode integrates the outer t-integral by
// composite Gauss quadrature on [0, t_max] with panel width
// 0.1 / max(1, |Delta|, eps), keeping the phase error uniform over a scan;
// the inner integral is always in closed form.
Complex retarded_amplitude(const TransitionConfig& cfg, EvalMode mode);

// Advanced amplitude, same conventions.
Complex advanced_amplitude(const TransitionConfig& cfg, EvalMode mode);

// Inner integral restricted to [0, t - rho] and outer window [0, t_max];
// exactly zero when rho >= t_max. Evaluated via the elementary
// antiderivative of the truncated double integral.
Complex signal_linked_retarded_amplitude(const TransitionConfig& cfg);

// Inner integral over (-inf, t] regardless of rho: the retarded amplitude
// with the rho-dependent factor removed. Nonzero and peaked for every rho.
Complex epr_retarded_amplitude(const TransitionConfig& cfg, EvalMode mode);

// Magnitude scan over detuning in [delta_lo, delta_hi] with n_points >= 11,
// varying E_f; analytic evaluation for retarded/advanced, the closed
// truncated form for signal_linked. Peak ties break toward the lower delta.
AmplitudeScan scan_delta(const TransitionConfig& base, double delta_lo, double delta_hi,
                         std::size_t n_points, ScanVariant which);

// Peak magnitudes |A(0)| along a regulator schedule that scales (epsilon,
// eta) by the given factors while keeping their ratio, with log-log slopes
// against eps - eta. Slope -1 signals 1/(eps - eta) peak growth.
struct RegulatorSweep {
  std::vector<double> eps_minus_eta;
  std::vector<double> peak_retarded;
  std::vector<double> peak_advanced;
  double slope_retarded = 0.0;
  double slope_advanced = 0.0;
};

RegulatorSweep regulator_sweep(const TransitionConfig& base,
                               const std::vector<double>& scale_factors = {10.0, 1.0, 0.1});

}  // namespace cmblab::arrow
