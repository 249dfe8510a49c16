#pragma once

#include "cmblab/radiometry.hpp"

// Diagnostics for the second-order coherence condition behind correlated
// two-photon absorption: the phase gap accumulated between two absorption
// events and the photon-to-absorber density margin.

namespace cmblab::coherence {

using radiometry::Temperature;

struct CoherenceReport {
  double phase_gap = 0.0;   // 2 pi nu delta_t, dimensionless
  double threshold = 0.0;
  bool satisfied = false;   // phase_gap < threshold
};

struct DensityRatioReport {
  double photon_density = 0.0;    // m^-3
  double absorber_density = 0.0;  // m^-3
  double ratio = 0.0;
  bool satisfied = false;  // ratio > margin
};

// Phase accumulated by a photon of frequency nu over the interval delta_t
// between two absorption events. The default threshold 0.1 is a convention
// for "much less than one", not physics.
CoherenceReport phase_gap(double nu_hz, double delta_t_s, double threshold = 0.1);

// Ratio of the blackbody photon number density at T to a user-supplied
// absorber density. The default margin 1e3 is a convention for "several
// orders of magnitude".
DensityRatioReport density_margin(Temperature temperature, double absorber_density_m3,
                                  double margin = 1e3);

}  // namespace cmblab::coherence
