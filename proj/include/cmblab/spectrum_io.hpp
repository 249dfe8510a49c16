#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cmblab/radiometry.hpp"

// CSV interchange for sampled spectra and helpers for deterministic JSON
// run reports.
//
// Spectrum files carry the exact header `freq_ghz,intensity,sigma`;
// frequencies are GHz at the file boundary and Hz inside the library. The
// sigma column is either filled on every row or empty on every row. All
// floating-point values are written with 17 significant digits, so a
// save/load round trip is bit-exact.

namespace cmblab::io {

// File-system problems (missing file, unwritable path). Malformed content
// raises std::domain_error instead, with the offending line in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

radiometry::SpectrumSamples load_spectrum(const std::string& path);

void save_spectrum(const radiometry::SpectrumSamples& samples, const std::string& path);

// 17-significant-digit decimal form, which round-trips the double exactly;
// non-finite values render as "null".
std::string format_double(double value);

// FNV-1a 64-bit digest of a file's bytes, as a fixed-width hex string.
std::string file_digest(const std::string& path);

// Serialize JSON with every finite floating value rendered by
// format_double; non-finite values become null. Key order is preserved.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace cmblab::io
