#include "cmblab/radiometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cmblab/constants.hpp"
#include "cmblab/quadrature.hpp"

namespace cmblab::radiometry {

namespace {

using constants::boltzmann_k;
using constants::pi;
using constants::planck_h;
using constants::speed_of_light;

}  // namespace

Temperature::Temperature(double kelvin) : kelvin_(kelvin) {
  if (!std::isfinite(kelvin) || kelvin < 0.0) {
    throw std::domain_error("Temperature: kelvin must be finite and >= 0, got " +
                            std::to_string(kelvin));
  }
}

SpectralGrid::SpectralGrid(std::vector<double> frequencies_hz)
    : frequencies_(std::move(frequencies_hz)) {
  if (frequencies_.size() < 2) {
    throw std::domain_error("SpectralGrid: need at least 2 frequencies");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < frequencies_.size(); ++i) {
    const double nu = frequencies_[i];
    if (!std::isfinite(nu) || nu <= 0.0) {
      throw std::domain_error("SpectralGrid: frequency " + std::to_string(i) +
                              " must be finite and > 0");
    }
    if (nu <= prev) {
      throw std::domain_error("SpectralGrid: frequencies must be strictly increasing at index " +
                              std::to_string(i));
    }
    prev = nu;
  }
}

SpectralGrid SpectralGrid::linear(double lo_hz, double hi_hz, std::size_t n) {
  if (n < 2) throw std::domain_error("SpectralGrid::linear: need n >= 2");
  if (!(lo_hz < hi_hz)) throw std::domain_error("SpectralGrid::linear: need lo < hi");
  std::vector<double> f(n);
  const double step = (hi_hz - lo_hz) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) f[i] = lo_hz + step * static_cast<double>(i);
  f.back() = hi_hz;
  return SpectralGrid(std::move(f));
}

SpectrumSamples::SpectrumSamples(SpectralGrid grid_in, std::vector<double> values_in,
                                 std::optional<std::vector<double>> sigmas_in)
    : grid(std::move(grid_in)), values(std::move(values_in)), sigmas(std::move(sigmas_in)) {
  if (values.size() != grid.size()) {
    throw std::domain_error("SpectrumSamples: values length must match grid length");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error("SpectrumSamples: values must be finite");
  }
  if (sigmas) {
    if (sigmas->size() != grid.size()) {
      throw std::domain_error("SpectrumSamples: sigmas length must match grid length");
    }
    for (double s : *sigmas) {
      if (!std::isfinite(s) || s < 0.0) {
        throw std::domain_error("SpectrumSamples: sigmas must be finite and >= 0");
      }
    }
  }
}

double planck_energy_density(double nu_hz, Temperature temperature) {
  const double t = temperature.kelvin();
  if (!std::isfinite(nu_hz) || nu_hz <= 0.0) {
    throw std::domain_error("planck_energy_density: frequency must be > 0");
  }
  if (t <= 0.0) {
    throw std::domain_error("planck_energy_density: temperature must be > 0");
  }
  const double x = planck_h * nu_hz / (boltzmann_k * t);
  const double c = speed_of_light;
  const double prefactor = 8.0 * pi * planck_h / (c * c * c);
  // expm1 keeps the Rayleigh-Jeans regime (x -> 0) accurate.
  return prefactor * nu_hz * nu_hz * nu_hz / std::expm1(x);
}

double planck_peak_x() {
  // Root of g(x) = x - 3 (1 - e^{-x}); Newton from x = 3 converges in a few
  // steps and the result is cached.
  static const double root = [] {
    double x = 3.0;
    for (int i = 0; i < 50; ++i) {
      const double ex = std::exp(-x);
      const double g = x - 3.0 * (1.0 - ex);
      const double dg = 1.0 - 3.0 * ex;
      const double dx = g / dg;
      x -= dx;
      if (std::abs(dx) < 1e-16 * x) break;
    }
    return x;
  }();
  return root;
}

double planck_peak_frequency(Temperature temperature) {
  const double t = temperature.kelvin();
  if (t <= 0.0) {
    throw std::domain_error("planck_peak_frequency: temperature must be > 0");
  }
  return planck_peak_x() * boltzmann_k * t / planck_h;
}

double photon_number_density(Temperature temperature) {
  const double t = temperature.kelvin();
  if (t == 0.0) return 0.0;
  // Dimensionless integral of x^2 / (e^x - 1) on [0, 50]; the tail beyond 50
  // is below 1e-18 relative. Fixed panel count keeps the integration error
  // independent of T.
  static const double dimensionless = [] {
    const auto& rule = quadrature::gauss_legendre(16);
    return quadrature::integrate([](double x) { return x * x / std::expm1(x); }, 0.0, 50.0, 50,
                                 rule);
  }();
  const double scale = boltzmann_k * t / planck_h;
  const double c = speed_of_light;
  return 8.0 * pi / (c * c * c) * scale * scale * scale * dimensionless;
}

}  // namespace cmblab::radiometry
