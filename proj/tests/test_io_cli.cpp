#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "cmblab/distortion.hpp"
#include "cmblab/radiometry.hpp"
#include "cmblab/rng.hpp"
#include "cmblab/spectrum_io.hpp"

using namespace cmblab;
using nlohmann::json;
using radiometry::SpectralGrid;
using radiometry::SpectrumSamples;
using radiometry::Temperature;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("cmblab_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// Run the CLI binary, capturing stdout into a file (and stderr into
// <file>.err); returns the exit code.
int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(CMBLAB_CLI_PATH) + " " + args + " > " + stdout_path + " 2>" +
                          stdout_path + ".err";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void remove_with_err(const std::string& path) {
  std::remove(path.c_str());
  std::remove((path + ".err").c_str());
}

}  // namespace

TEST_CASE("spectrum csv round trip is bit exact") {
  const std::string path = temp_path("roundtrip.csv");

  // Awkward, non-representable frequencies exercise the exponent-shift
  // conversion.
  std::mt19937_64 gen(3);
  std::vector<double> freqs;
  double f = 1e9;
  for (int i = 0; i < 50; ++i) {
    f += (0.5 + rng::uniform_unit(gen)) * 7.73e8;
    freqs.push_back(f);
  }
  std::vector<double> values, sigmas;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    values.push_back((rng::uniform_unit(gen) - 0.5) * 1e-25);
    sigmas.push_back(rng::uniform_unit(gen) * 1e-27);
  }
  const SpectrumSamples original(SpectralGrid(freqs), values, sigmas);
  io::save_spectrum(original, path);
  const SpectrumSamples loaded = io::load_spectrum(path);

  REQUIRE(loaded.grid.size() == original.grid.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    CHECK(loaded.grid[i] == original.grid[i]);
    CHECK(loaded.values[i] == original.values[i]);
    CHECK((*loaded.sigmas)[i] == (*original.sigmas)[i]);
  }

  // Saving the loaded samples reproduces the identical file.
  const std::string path2 = temp_path("roundtrip2.csv");
  io::save_spectrum(loaded, path2);
  CHECK(read_file(path) == read_file(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("sigma-free samples write an empty third column") {
  const std::string path = temp_path("nosigma.csv");
  const SpectrumSamples samples(SpectralGrid({30e9, 60e9, 90e9}), {1.0, 2.0, 3.0});
  io::save_spectrum(samples, path);
  const std::string text = read_file(path);
  CHECK(text.find(",1,\n") != std::string::npos);
  const SpectrumSamples loaded = io::load_spectrum(path);
  CHECK(!loaded.sigmas.has_value());
  std::remove(path.c_str());
}

TEST_CASE("load rejects malformed files with the offending line") {
  const std::string path = temp_path("bad.csv");

  write_file(path, "freq,intensity\n30,1,\n60,2,\n");
  std::string msg = message_of([&] { io::load_spectrum(path); });
  CHECK(msg.find("line 1") != std::string::npos);
  CHECK(msg.find("header") != std::string::npos);

  write_file(path, "freq_ghz,intensity,sigma\n30,1,\n30,2,\n");
  msg = message_of([&] { io::load_spectrum(path); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("increasing") != std::string::npos);

  write_file(path, "freq_ghz,intensity,sigma\n30,1,\n60,abc,\n");
  msg = message_of([&] { io::load_spectrum(path); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("abc") != std::string::npos);

  write_file(path, "freq_ghz,intensity,sigma\n30,1\n");
  msg = message_of([&] { io::load_spectrum(path); });
  CHECK(msg.find("line 2") != std::string::npos);

  write_file(path, "freq_ghz,intensity,sigma\n30,1,0.1\n60,2,\n");
  msg = message_of([&] { io::load_spectrum(path); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("sigma") != std::string::npos);

  write_file(path, "freq_ghz,intensity,sigma\n30,1,\n");
  CHECK_THROWS_AS(io::load_spectrum(path), std::domain_error);

  CHECK_THROWS_AS(io::load_spectrum("definitely_missing_file.csv"), io::IoError);
  std::remove(path.c_str());
}

TEST_CASE("cli: distort with alpha 0 equals spectrum bit for bit") {
  const std::string csv_a = temp_path("cli_planck.csv");
  const std::string csv_b = temp_path("cli_distort0.csv");
  CHECK(run_cli("spectrum --temp-k 2.725 --grid 30:600:50 --out-csv " + csv_a,
                temp_path("r1.json")) == 0);
  CHECK(run_cli("distort --temp-k 2.725 --alpha 0 --grid 30:600:50 --out-csv " + csv_b,
                temp_path("r2.json")) == 0);
  CHECK(read_file(csv_a) == read_file(csv_b));
  // Success does not emit error text.
  CHECK(read_file(temp_path("r1.json") + ".err").empty());
  for (const char* p : {"cli_planck.csv", "cli_distort0.csv", "r1.json", "r2.json",
                        "r1.json.err", "r2.json.err"}) {
    std::remove(temp_path(p).c_str());
  }
}

TEST_CASE("cli: synth is deterministic per seed") {
  const std::string csv = temp_path("synth_rep.csv");
  const std::string args = "synth --temp-k 2.725 --alpha 0.1 --grid 30:600:100 "
                           "--noise-rel 0.01 --seed 42 --out-csv " + csv;
  CHECK(run_cli(args, temp_path("r3.json")) == 0);
  const std::string first = read_file(csv);
  CHECK(run_cli(args, temp_path("r4.json")) == 0);
  CHECK(first == read_file(csv));
  CHECK(!first.empty());

  // Reports differ at most in the timestamp.
  json ra = json::parse(read_file(temp_path("r3.json")));
  json rb = json::parse(read_file(temp_path("r4.json")));
  ra.erase("timestamp_utc");
  rb.erase("timestamp_utc");
  CHECK(ra == rb);

  // A different seed changes the data.
  const std::string other_args = "synth --temp-k 2.725 --alpha 0.1 --grid 30:600:100 "
                                 "--noise-rel 0.01 --seed 43 --out-csv " + csv;
  CHECK(run_cli(other_args, temp_path("r5x.json")) == 0);
  CHECK(first != read_file(csv));

  for (const char* p : {"synth_rep.csv", "r3.json", "r4.json", "r5x.json", "r3.json.err",
                        "r4.json.err", "r5x.json.err"}) {
    std::remove(temp_path(p).c_str());
  }
}

TEST_CASE("cli: synth then fit recovers the model") {
  const std::string csv = temp_path("synth_fit.csv");
  const std::string report_path = temp_path("fit_report.json");
  CHECK(run_cli("synth --temp-k 2.725 --alpha 0.1 --grid 30:600:200 --noise-rel 0.01 --seed 42 "
                "--out-csv " + csv,
                temp_path("r5.json")) == 0);
  CHECK(run_cli("fit --input " + csv + " --model distortion", report_path) == 0);
  const json report = json::parse(read_file(report_path));
  CHECK(report["command"] == "fit");
  CHECK(report["results"]["model"] == "distortion");
  CHECK(std::abs(report["results"]["temperature_kelvin"].get<double>() - 2.725) <
        0.01 * 2.725);
  CHECK(std::abs(report["results"]["alpha"].get<double>() - 0.1) < 0.02);
  CHECK(report["results"]["converged"].get<bool>());
  CHECK(report["input_digest"].is_string());

  std::remove(csv.c_str());
  remove_with_err(report_path);
  remove_with_err(temp_path("r5.json"));
}

TEST_CASE("cli: coherence report") {
  const std::string report_path = temp_path("coh.json");
  CHECK(run_cli("coherence --freq-ghz 150 --dt-ps 0.1", report_path) == 0);
  const json report = json::parse(read_file(report_path));
  CHECK(report["results"]["phase_gap"]["satisfied"].get<bool>());
  const double gap = report["results"]["phase_gap"]["phase_gap"].get<double>();
  CHECK(std::abs(gap - 0.0942477796076938) < 1e-12);

  CHECK(run_cli("coherence --freq-ghz 150 --dt-ps 1", report_path) == 0);
  const json loose = json::parse(read_file(report_path));
  CHECK(!loose["results"]["phase_gap"]["satisfied"].get<bool>());

  CHECK(run_cli("coherence --freq-ghz 150 --dt-ps 0.1 --temp-k 2.725 --absorber-density 0.25",
                report_path) == 0);
  const json dens = json::parse(read_file(report_path));
  CHECK(dens["results"]["density_margin"]["satisfied"].get<bool>());

  // --temp-k without --absorber-density is a validation error.
  CHECK(run_cli("coherence --freq-ghz 150 --dt-ps 0.1 --temp-k 2.725", report_path) == 1);
  remove_with_err(report_path);
}

TEST_CASE("cli: exit codes") {
  CHECK(run_cli("no-such-command", temp_path("x.json")) == 1);
  CHECK(run_cli("spectrum --temp-k 2.725 --grid 30:600:50 --bogus-flag 1 --out-csv x.csv",
                temp_path("x.json")) == 1);
  // Validation error inside a subcommand: alpha out of range.
  CHECK(run_cli("distort --temp-k 2.725 --alpha 1.5 --grid 30:600:50 --out-csv " +
                    temp_path("y.csv"),
                temp_path("x.json")) == 1);
  // I/O error: missing input file.
  CHECK(run_cli("fit --input definitely_missing.csv", temp_path("x.json")) == 2);
  // Unwritable output path.
  CHECK(run_cli("spectrum --temp-k 2.725 --grid 30:600:50 --out-csv /no/such/dir/out.csv",
                temp_path("x.json")) == 2);
  remove_with_err(temp_path("x.json"));
}

TEST_CASE("cli: gauge-check json report") {
  const std::string report_path = temp_path("gauge.json");
  CHECK(run_cli("gauge-check --seed 1 --lattice 16x16 --trials 3", report_path) == 0);
  const json report = json::parse(read_file(report_path));
  CHECK(report["command"] == "gauge-check");
  CHECK(report["parameters"]["lattice"]["n_t"] == 16);
  CHECK(report["seeds"]["base"] == 1);
  CHECK(report["results"]["pass_standard"].get<bool>());
  CHECK(report["results"]["pass_broken"].get<bool>());
  CHECK(report["results"]["pass_covariance"].get<bool>());
  CHECK(report["results"]["max_standard_commutator_residual"].get<double>() <= 1e-12);

  // Non-square lattices parse and pass too.
  CHECK(run_cli("gauge-check --seed 5 --lattice 12x8 --trials 2", report_path) == 0);
  const json rect = json::parse(read_file(report_path));
  CHECK(rect["parameters"]["lattice"]["n_t"] == 12);
  CHECK(rect["parameters"]["lattice"]["n_z"] == 8);
  CHECK(rect["results"]["pass_standard"].get<bool>());

  CHECK(run_cli("gauge-check --lattice nonsense", report_path) == 1);
  remove_with_err(report_path);
}

TEST_CASE("cli: arrow-scan emits csv and summary") {
  const std::string csv = temp_path("arrow.csv");
  const std::string report_path = temp_path("arrow.json");
  CHECK(run_cli("arrow-scan --eps 0.015 --eta 0.005 --rho 0 --delta -1:1:501 --out-csv " + csv,
                report_path) == 0);
  const json report = json::parse(read_file(report_path));
  CHECK(std::abs(report["results"]["peak_delta"].get<double>()) <= 2.0 / 500.0);
  const double width = report["results"]["half_width"].get<double>();
  CHECK(std::abs(width - 0.01) < 0.05 * 0.01);
  CHECK(std::abs(report["results"]["regulator_sweep"]["slope_retarded"].get<double>() + 1.0) <
        0.02);
  CHECK(report["results"]["regulator_sweep"]["stronger_peak_growth"] == "retarded");

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "delta,magnitude_retarded,magnitude_advanced,magnitude_signal_linked");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 501);

  // --variant switches which scan the summary statistics describe; the
  // advanced Lorentzian is wider, with half width eps + eta.
  CHECK(run_cli("arrow-scan --eps 0.015 --eta 0.005 --rho 0 --delta -1:1:501 "
                "--variant advanced --out-csv " + csv,
                report_path) == 0);
  const json adv = json::parse(read_file(report_path));
  CHECK(std::abs(adv["results"]["half_width"].get<double>() - 0.02) < 0.05 * 0.02);

  std::remove(csv.c_str());
  remove_with_err(report_path);
}

TEST_CASE("json reports carry 17 significant digits") {
  nlohmann::ordered_json j;
  j["value"] = 0.1;
  j["nested"] = nlohmann::ordered_json{{"pi_ish", 3.141592653589793}};
  const std::string text = io::dump_json(j);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("3.1415926535897931") != std::string::npos);
}
