#include "cmblab/coherence.hpp"

#include <cmath>
#include <stdexcept>

#include "cmblab/constants.hpp"

namespace cmblab::coherence {

CoherenceReport phase_gap(double nu_hz, double delta_t_s, double threshold) {
  if (!std::isfinite(nu_hz) || nu_hz <= 0.0) {
    throw std::domain_error("phase_gap: frequency must be > 0");
  }
  if (!std::isfinite(delta_t_s) || delta_t_s < 0.0) {
    throw std::domain_error("phase_gap: time interval must be >= 0");
  }
  if (!std::isfinite(threshold) || threshold <= 0.0) {
    throw std::domain_error("phase_gap: threshold must be > 0");
  }
  CoherenceReport report;
  report.phase_gap = 2.0 * constants::pi * nu_hz * delta_t_s;
  report.threshold = threshold;
  report.satisfied = report.phase_gap < threshold;
  return report;
}

DensityRatioReport density_margin(Temperature temperature, double absorber_density_m3,
                                  double margin) {
  if (temperature.kelvin() <= 0.0) {
    throw std::domain_error("density_margin: temperature must be > 0");
  }
  if (!std::isfinite(absorber_density_m3) || absorber_density_m3 <= 0.0) {
    throw std::domain_error("density_margin: absorber density must be > 0");
  }
  if (!std::isfinite(margin) || margin <= 0.0) {
    throw std::domain_error("density_margin: margin must be > 0");
  }
  DensityRatioReport report;
  report.photon_density = radiometry::photon_number_density(temperature);
  report.absorber_density = absorber_density_m3;
  report.ratio = report.photon_density / absorber_density_m3;
  report.satisfied = report.ratio > margin;
  return report;
}

}  // namespace cmblab::coherence
