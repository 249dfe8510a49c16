// cmblab command-line front end.
//
// Subcommands:
//   spectrum    Planck samples on a frequency grid
//   distort     two-photon-distorted spectrum G = E - alpha E(nu/2)
//   synth       distorted spectrum with seeded multiplicative noise
//   fit         Planck or distortion parameter fit of a CSV spectrum
//   coherence   phase-gap and photon/absorber density diagnostics
//   gauge-check invariance / necessity / covariance suite on the lattice
//   arrow-scan  retarded vs advanced vs signal-linked amplitude scan
//
// Every run emits a JSON report (stdout or --out) whose floating-point
// values carry 17 significant digits; bulk arrays go to CSV files. Exit
// codes: 0 success, 1 domain or validation error, 2 I/O error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmblab/arrow.hpp"
#include "cmblab/coherence.hpp"
#include "cmblab/distortion.hpp"
#include "cmblab/nonlocal.hpp"
#include "cmblab/radiometry.hpp"
#include "cmblab/spectrum_io.hpp"
#include "cmblab/version.hpp"

namespace {

using nlohmann::ordered_json;
namespace rad = cmblab::radiometry;
namespace dist = cmblab::distortion;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json new_report(const std::string& command) {
  ordered_json report;
  report["command"] = command;
  report["tool_version"] = cmblab::version_string;
  report["timestamp_utc"] = utc_timestamp();
  report["input_digest"] = nullptr;
  return report;
}

void emit_report(const ordered_json& report, const std::string& out_path) {
  const std::string text = cmblab::io::dump_json(report) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw cmblab::io::IoError("cannot open '" + out_path + "' for writing");
  out << text;
  if (!out) throw cmblab::io::IoError("failed while writing '" + out_path + "'");
}

// lo:hi:n with linear spacing; used for frequency grids (GHz) and detuning.
struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

RangeSpec parse_range(const std::string& text) {
  RangeSpec spec;
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1) {
    throw std::domain_error("range '" + text + "' must look like lo:hi:n");
  }
  try {
    spec.lo = std::stod(text.substr(0, c1));
    spec.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const long n = std::stol(text.substr(c2 + 1));
    if (n < 2) throw std::domain_error("range needs n >= 2");
    spec.n = static_cast<std::size_t>(n);
  } catch (const std::invalid_argument&) {
    throw std::domain_error("range '" + text + "' has non-numeric parts");
  } catch (const std::out_of_range&) {
    throw std::domain_error("range '" + text + "' is out of range");
  }
  if (!(spec.lo < spec.hi)) throw std::domain_error("range needs lo < hi");
  return spec;
}

rad::SpectralGrid grid_from_ghz_range(const RangeSpec& spec) {
  std::vector<double> hz(spec.n);
  const double step = (spec.hi - spec.lo) / static_cast<double>(spec.n - 1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    hz[i] = (spec.lo + step * static_cast<double>(i)) * 1e9;
  }
  return rad::SpectralGrid(std::move(hz));
}

ordered_json fit_result_json(const dist::FitResult& fit, const std::string& model) {
  ordered_json j;
  j["model"] = model;
  j["temperature_kelvin"] = fit.temperature.kelvin();
  if (fit.alpha) {
    j["alpha"] = *fit.alpha;
  }
  j["residual_norm"] = fit.residual_norm;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  if (fit.covariance_diag) {
    j["covariance_diag"] = *fit.covariance_diag;
  } else {
    j["covariance_diag"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  double temp_k = 2.725;
  std::string grid;
  std::string out_csv;
  std::string out;
  double alpha = 0.0;          // distort / synth
  double noise_rel = 0.0;      // synth
  std::uint64_t seed = 0;      // synth
};

int run_spectrum_family(const std::string& command, const SpectrumArgs& args) {
  const RangeSpec range = parse_range(args.grid);
  const rad::SpectralGrid grid = grid_from_ghz_range(range);

  rad::SpectrumSamples samples = [&] {
    if (command == "spectrum") {
      std::vector<double> values(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = rad::planck_energy_density(grid[i], rad::Temperature(args.temp_k));
      }
      return rad::SpectrumSamples(grid, std::move(values));
    }
    const dist::DistortionModel model(rad::Temperature(args.temp_k), args.alpha);
    if (command == "distort") return dist::distorted_spectrum(grid, model);
    return dist::synthesize_observation(model, grid, args.noise_rel, args.seed);
  }();

  cmblab::io::save_spectrum(samples, args.out_csv);

  ordered_json report = new_report(command);
  ordered_json& params = report["parameters"];
  params["temp_k"] = args.temp_k;
  params["grid_ghz"] = args.grid;
  if (command != "spectrum") params["alpha"] = args.alpha;
  if (command == "synth") {
    params["noise_rel"] = args.noise_rel;
    report["seeds"] = ordered_json{{"noise", args.seed}};
  }
  ordered_json& results = report["results"];
  results["n_points"] = samples.grid.size();
  results["output_csv"] = args.out_csv;
  results["output_digest"] = cmblab::io::file_digest(args.out_csv);
  emit_report(report, args.out);
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string model = "distortion";
  std::string out;
  dist::ParameterBox box;
};

int run_fit(const FitArgs& args) {
  const rad::SpectrumSamples samples = cmblab::io::load_spectrum(args.input);

  dist::FitResult fit =
      args.model == "planck"
          ? dist::fit_planck_temperature(samples, args.box.t_lo_kelvin, args.box.t_hi_kelvin)
          : dist::fit_distortion(samples, args.box);

  ordered_json report = new_report("fit");
  report["input_digest"] = cmblab::io::file_digest(args.input);
  ordered_json& params = report["parameters"];
  params["input"] = args.input;
  params["model"] = args.model;
  params["t_lo_kelvin"] = args.box.t_lo_kelvin;
  params["t_hi_kelvin"] = args.box.t_hi_kelvin;
  if (args.model != "planck") {
    params["alpha_lo"] = args.box.alpha_lo;
    params["alpha_hi"] = args.box.alpha_hi;
  }
  report["results"] = fit_result_json(fit, args.model);
  emit_report(report, args.out);
  return 0;
}

// --------------------------------------------------------------- coherence

struct CoherenceArgs {
  double freq_ghz = 0.0;
  double dt_ps = 0.0;
  double threshold = 0.1;
  std::optional<double> temp_k;
  std::optional<double> absorber_density;
  double margin = 1e3;
  std::string out;
};

int run_coherence(const CoherenceArgs& args) {
  const auto phase = cmblab::coherence::phase_gap(args.freq_ghz * 1e9, args.dt_ps * 1e-12,
                                                  args.threshold);
  ordered_json report = new_report("coherence");
  ordered_json& params = report["parameters"];
  params["freq_ghz"] = args.freq_ghz;
  params["dt_ps"] = args.dt_ps;
  params["threshold"] = args.threshold;
  ordered_json& results = report["results"];
  results["phase_gap"] = ordered_json{{"phase_gap", phase.phase_gap},
                                      {"threshold", phase.threshold},
                                      {"satisfied", phase.satisfied}};
  if (args.temp_k.has_value() != args.absorber_density.has_value()) {
    throw std::domain_error("coherence: --temp-k and --absorber-density must be given together");
  }
  if (args.temp_k) {
    params["temp_k"] = *args.temp_k;
    params["absorber_density"] = *args.absorber_density;
    params["margin"] = args.margin;
    const auto density = cmblab::coherence::density_margin(rad::Temperature(*args.temp_k),
                                                           *args.absorber_density, args.margin);
    results["density_margin"] = ordered_json{{"photon_density", density.photon_density},
                                             {"absorber_density", density.absorber_density},
                                             {"ratio", density.ratio},
                                             {"satisfied", density.satisfied}};
  }
  emit_report(report, args.out);
  return 0;
}

// ------------------------------------------------------------- gauge-check

struct GaugeArgs {
  std::uint64_t seed = 1;
  std::string lattice = "16x16";
  int trials = 100;
  std::string out;
};

int run_gauge_check(const GaugeArgs& args) {
  const std::size_t xpos = args.lattice.find('x');
  if (xpos == std::string::npos) {
    throw std::domain_error("lattice '" + args.lattice + "' must look like NtxNz, e.g. 16x16");
  }
  std::size_t n_t = 0, n_z = 0;
  try {
    n_t = static_cast<std::size_t>(std::stoul(args.lattice.substr(0, xpos)));
    n_z = static_cast<std::size_t>(std::stoul(args.lattice.substr(xpos + 1)));
  } catch (const std::exception&) {
    throw std::domain_error("lattice '" + args.lattice + "' has non-numeric extents");
  }

  cmblab::nonlocal::GaugeCheckConfig config;
  config.lattice = cmblab::nonlocal::Lattice(n_t, n_z, 1.0 / static_cast<double>(n_t),
                                             1.0 / static_cast<double>(n_z));
  config.seed = args.seed;
  config.trials = args.trials;
  const auto gauge = cmblab::nonlocal::run_gauge_checks(config);

  ordered_json report = new_report("gauge-check");
  ordered_json& params = report["parameters"];
  params["lattice"] = ordered_json{{"n_t", config.lattice.n_t},
                                   {"n_z", config.lattice.n_z},
                                   {"h_t", config.lattice.h_t},
                                   {"h_z", config.lattice.h_z}};
  params["trials"] = config.trials;
  params["broken_amplitude"] = config.broken_amplitude;
  params["couplings"] = config.couplings;
  report["seeds"] = ordered_json{{"base", config.seed}};
  ordered_json& results = report["results"];
  results["max_standard_commutator_residual"] = gauge.max_standard_commutator;
  results["min_broken_commutator_residual"] = gauge.min_broken_commutator;
  results["max_standard_invariance_residual"] = gauge.max_standard_invariance;
  results["min_broken_invariance_residual"] = gauge.min_broken_invariance;
  results["covariance_residuals"] = gauge.covariance_residuals;
  results["covariance_slope"] = gauge.covariance_slope;
  results["pass_standard"] = gauge.pass_standard;
  results["pass_broken"] = gauge.pass_broken;
  results["pass_covariance"] = gauge.pass_covariance;
  emit_report(report, args.out);
  return 0;
}

// -------------------------------------------------------------- arrow-scan

struct ArrowArgs {
  double eps = 1e-2;
  double eta = 5e-3;
  double rho = 0.0;
  std::string delta = "-1:1:2001";
  double t_max = 0.0;  // 0 means 50/eps
  std::string variant = "retarded";
  std::string out_csv;
  std::string out;
};

int run_arrow_scan(const ArrowArgs& args) {
  const RangeSpec range = parse_range(args.delta);
  if (!(range.lo <= 0.0 && 0.0 <= range.hi)) {
    throw std::domain_error("arrow-scan: delta range must contain 0");
  }
  cmblab::arrow::TransitionConfig base;
  base.epsilon = args.eps;
  base.eta = args.eta;
  base.rho = args.rho;
  base.t_max = args.t_max > 0.0 ? args.t_max : 50.0 / args.eps;
  base.validate();

  using cmblab::arrow::ScanVariant;
  ScanVariant which = ScanVariant::retarded;
  if (args.variant == "advanced") {
    which = ScanVariant::advanced;
  } else if (args.variant == "signal-linked") {
    which = ScanVariant::signal_linked;
  } else if (args.variant != "retarded") {
    throw std::domain_error("arrow-scan: variant must be retarded, advanced, or signal-linked");
  }

  const auto retarded =
      cmblab::arrow::scan_delta(base, range.lo, range.hi, range.n, ScanVariant::retarded);
  const auto advanced =
      cmblab::arrow::scan_delta(base, range.lo, range.hi, range.n, ScanVariant::advanced);
  const auto linked =
      cmblab::arrow::scan_delta(base, range.lo, range.hi, range.n, ScanVariant::signal_linked);

  std::ofstream csv(args.out_csv);
  if (!csv) throw cmblab::io::IoError("cannot open '" + args.out_csv + "' for writing");
  csv << "delta,magnitude_retarded,magnitude_advanced,magnitude_signal_linked\n";
  for (std::size_t i = 0; i < retarded.deltas.size(); ++i) {
    csv << cmblab::io::format_double(retarded.deltas[i]) << ','
        << cmblab::io::format_double(retarded.magnitudes[i]) << ','
        << cmblab::io::format_double(advanced.magnitudes[i]) << ','
        << cmblab::io::format_double(linked.magnitudes[i]) << '\n';
  }
  if (!csv) throw cmblab::io::IoError("failed while writing '" + args.out_csv + "'");
  csv.close();

  const auto& selected = which == ScanVariant::retarded   ? retarded
                         : which == ScanVariant::advanced ? advanced
                                                          : linked;
  const auto sweep = cmblab::arrow::regulator_sweep(base);

  ordered_json report = new_report("arrow-scan");
  ordered_json& params = report["parameters"];
  params["eps"] = args.eps;
  params["eta"] = args.eta;
  params["rho"] = args.rho;
  params["t_max"] = base.t_max;
  params["delta"] = args.delta;
  params["variant"] = args.variant;
  params["energy_initial"] = base.energy_initial;
  params["omega"] = base.omega;
  params["omega_prime"] = base.omega_prime;
  ordered_json& results = report["results"];
  results["output_csv"] = args.out_csv;
  results["output_digest"] = cmblab::io::file_digest(args.out_csv);
  results["peak_delta"] = selected.peak_delta;
  results["peak_magnitude"] = selected.peak_magnitude;
  results["half_width"] = selected.half_width;  // null in the report when unmeasurable
  results["regulator_sweep"] =
      ordered_json{{"eps_minus_eta", sweep.eps_minus_eta},
                   {"peak_retarded", sweep.peak_retarded},
                   {"peak_advanced", sweep.peak_advanced},
                   {"slope_retarded", sweep.slope_retarded},
                   {"slope_advanced", sweep.slope_advanced},
                   {"stronger_peak_growth",
                    sweep.peak_retarded.back() > sweep.peak_advanced.back() ? "retarded"
                                                                            : "advanced"}};
  emit_report(report, args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory: distorted blackbody spectra, non-local gauge kernels, "
               "and retarded-time amplitude scans"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  SpectrumArgs spectrum_args;
  FitArgs fit_args;
  CoherenceArgs coherence_args;
  GaugeArgs gauge_args;
  ArrowArgs arrow_args;
  std::string command;

  auto add_spectrum_flags = [&](CLI::App* cmd, bool with_alpha, bool with_noise) {
    cmd->add_option("--temp-k", spectrum_args.temp_k, "blackbody temperature in kelvin")
        ->required();
    cmd->add_option("--grid", spectrum_args.grid, "frequency grid lo:hi:n in GHz")->required();
    cmd->add_option("--out-csv", spectrum_args.out_csv, "output CSV path")->required();
    cmd->add_option("--out", spectrum_args.out, "write the JSON report here instead of stdout");
    if (with_alpha) {
      cmd->add_option("--alpha", spectrum_args.alpha, "two-photon absorption factor in [0,1)")
          ->required();
    }
    if (with_noise) {
      cmd->add_option("--noise-rel", spectrum_args.noise_rel, "relative 1-sigma noise level")
          ->required();
      cmd->add_option("--seed", spectrum_args.seed, "noise generator seed")->required();
    }
  };

  add_spectrum_flags(app.add_subcommand("spectrum", "emit Planck samples"), false, false);
  add_spectrum_flags(app.add_subcommand("distort", "emit the distorted spectrum G"), true, false);
  add_spectrum_flags(app.add_subcommand("synth", "emit a noisy synthetic observation"), true, true);

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a spectrum CSV");
  fit_cmd->add_option("--input", fit_args.input, "input spectrum CSV")->required();
  fit_cmd->add_option("--model", fit_args.model, "planck or distortion")
      ->check(CLI::IsMember({"planck", "distortion"}));
  fit_cmd->add_option("--t-lo", fit_args.box.t_lo_kelvin, "temperature lower bound, K");
  fit_cmd->add_option("--t-hi", fit_args.box.t_hi_kelvin, "temperature upper bound, K");
  fit_cmd->add_option("--alpha-lo", fit_args.box.alpha_lo, "alpha lower bound");
  fit_cmd->add_option("--alpha-hi", fit_args.box.alpha_hi, "alpha upper bound");
  fit_cmd->add_option("--out", fit_args.out, "write the JSON report here instead of stdout");

  CLI::App* coh_cmd = app.add_subcommand("coherence", "second-order coherence diagnostics");
  coh_cmd->add_option("--freq-ghz", coherence_args.freq_ghz, "photon frequency in GHz")
      ->required();
  coh_cmd->add_option("--dt-ps", coherence_args.dt_ps, "absorption time gap in ps")->required();
  coh_cmd->add_option("--threshold", coherence_args.threshold, "phase-gap threshold");
  coh_cmd->add_option("--temp-k", coherence_args.temp_k, "blackbody temperature in kelvin");
  coh_cmd->add_option("--absorber-density", coherence_args.absorber_density,
                      "absorber density in m^-3");
  coh_cmd->add_option("--margin", coherence_args.margin, "required photon/absorber ratio");
  coh_cmd->add_option("--out", coherence_args.out, "write the JSON report here instead of stdout");

  CLI::App* gauge_cmd = app.add_subcommand("gauge-check", "run the lattice gauge suite");
  gauge_cmd->add_option("--seed", gauge_args.seed, "base seed for the random trials");
  gauge_cmd->add_option("--lattice", gauge_args.lattice, "lattice extents NtxNz");
  gauge_cmd->add_option("--trials", gauge_args.trials, "number of random trials")
      ->check(CLI::PositiveNumber);
  gauge_cmd->add_option("--out", gauge_args.out, "write the JSON report here instead of stdout");

  CLI::App* arrow_cmd = app.add_subcommand("arrow-scan", "scan amplitudes over detuning");
  arrow_cmd->add_option("--eps", arrow_args.eps, "outer regulator epsilon")->required();
  arrow_cmd->add_option("--eta", arrow_args.eta, "inner regulator eta")->required();
  arrow_cmd->add_option("--rho", arrow_args.rho, "spatial separation rho");
  arrow_cmd->add_option("--delta", arrow_args.delta, "detuning range lo:hi:n");
  arrow_cmd->add_option("--t-max", arrow_args.t_max, "outer window (default 50/eps)");
  arrow_cmd->add_option("--variant", arrow_args.variant,
                        "retarded, advanced, or signal-linked (summary statistics)");
  arrow_cmd->add_option("--out-csv", arrow_args.out_csv, "output CSV path")->required();
  arrow_cmd->add_option("--out", arrow_args.out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("spectrum")) return run_spectrum_family("spectrum", spectrum_args);
    if (app.got_subcommand("distort")) return run_spectrum_family("distort", spectrum_args);
    if (app.got_subcommand("synth")) return run_spectrum_family("synth", spectrum_args);
    if (app.got_subcommand("fit")) return run_fit(fit_args);
    if (app.got_subcommand("coherence")) return run_coherence(coherence_args);
    if (app.got_subcommand("gauge-check")) return run_gauge_check(gauge_args);
    if (app.got_subcommand("arrow-scan")) return run_arrow_scan(arrow_args);
  } catch (const cmblab::io::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
