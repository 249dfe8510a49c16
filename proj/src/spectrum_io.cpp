#include "cmblab/spectrum_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace cmblab::io {

namespace {

constexpr const char* kHeader = "freq_ghz,intensity,sigma";

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::domain_error(path + ": line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line,
                    const char* column) {
  double out = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
    parse_fail(path, line, std::string("cell '") + cell + "' in column " + column +
                               " is not a finite number");
  }
  return out;
}

// The frequency column is GHz in the file and Hz in memory. The conversion
// shifts the decimal exponent in text, which is exact, instead of
// multiplying by 1e9, which can move the low bit.
std::string shift_exponent(const std::string& digits, int shift) {
  const std::size_t epos = digits.find_first_of("eE");
  std::string mantissa;
  int exponent = 0;
  if (epos == std::string::npos) {
    mantissa = digits;
  } else {
    mantissa = digits.substr(0, epos);
    exponent = std::stoi(digits.substr(epos + 1));
  }
  return mantissa + "e" + std::to_string(exponent + shift);
}

double parse_ghz_as_hz(const std::string& cell, const std::string& path, std::size_t line) {
  // Validate the raw cell first so error messages show the user's text.
  const double ghz = parse_number(cell, path, line, "freq_ghz");
  if (!(ghz > 0.0)) parse_fail(path, line, "freq_ghz must be > 0");
  const std::string hz_text = shift_exponent(cell, 9);
  return parse_number(hz_text, path, line, "freq_ghz");
}

std::string format_hz_as_ghz(double hz) {
  char buf[64];
  // 16 digits after the point = 17 significant digits, always scientific so
  // the exponent shift below stays textual.
  std::snprintf(buf, sizeof(buf), "%.16e", hz);
  return shift_exponent(buf, -9);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

radiometry::SpectrumSamples load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) parse_fail(path, 1, "empty file, expected header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    parse_fail(path, 1, std::string("expected header '") + kHeader + "', got '" + line + "'");
  }

  std::vector<double> freqs, values, sigmas;
  bool sigma_present = false;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != 3) {
      parse_fail(path, line_no,
                 "expected 3 comma-separated cells, got " + std::to_string(cells.size()));
    }
    const double hz = parse_ghz_as_hz(cells[0], path, line_no);
    if (!freqs.empty() && hz <= freqs.back()) {
      parse_fail(path, line_no, "freq_ghz must be strictly increasing");
    }
    const double value = parse_number(cells[1], path, line_no, "intensity");

    const bool has_sigma = !cells[2].empty();
    if (first_row) {
      sigma_present = has_sigma;
      first_row = false;
    } else if (has_sigma != sigma_present) {
      parse_fail(path, line_no, "sigma column must be filled on every row or on none");
    }
    if (has_sigma) {
      const double sigma = parse_number(cells[2], path, line_no, "sigma");
      if (sigma < 0.0) parse_fail(path, line_no, "sigma must be >= 0");
      sigmas.push_back(sigma);
    }
    freqs.push_back(hz);
    values.push_back(value);
  }
  if (freqs.size() < 2) {
    parse_fail(path, line_no + 1, "need at least 2 data rows");
  }
  std::optional<std::vector<double>> maybe_sigmas;
  if (sigma_present) maybe_sigmas = std::move(sigmas);
  return radiometry::SpectrumSamples(radiometry::SpectralGrid(std::move(freqs)), std::move(values),
                                     std::move(maybe_sigmas));
}

void save_spectrum(const radiometry::SpectrumSamples& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kHeader << '\n';
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    out << format_hz_as_ghz(samples.grid[i]) << ',' << format_double(samples.values[i]) << ',';
    if (samples.sigmas) out << format_double((*samples.sigmas)[i]);
    out << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for digesting");
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a offset basis
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 1099511628211ull;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

void dump_value(const nlohmann::ordered_json& v, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        out += pad_in;
        out += nlohmann::ordered_json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
        if (i + 1 < v.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += pad_in;
        dump_value(v[i], out, indent, depth + 1);
        if (i + 1 < v.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  dump_value(value, out, indent, 0);
  return out;
}

}  // namespace cmblab::io
