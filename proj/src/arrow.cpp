#include "cmblab/arrow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cmblab/quadrature.hpp"

namespace cmblab::arrow {

namespace {

constexpr Complex kI{0.0, 1.0};

// f(t) phase coefficient: a = E_f - omega.
double outer_frequency(const TransitionConfig& cfg) { return cfg.energy_final - cfg.omega; }

// g(t') phase coefficient: b = E_i + omega'.
double inner_frequency(const TransitionConfig& cfg) { return cfg.energy_initial + cfg.omega_prime; }

std::size_t panel_count(const TransitionConfig& cfg) {
  const double width = 0.1 / std::max({1.0, std::abs(cfg.detuning()), cfg.epsilon});
  return static_cast<std::size_t>(std::ceil(cfg.t_max / width));
}

template <typename F>
Complex outer_quadrature(const TransitionConfig& cfg, double lo, F&& integrand) {
  const auto& rule = quadrature::gauss_legendre(8);
  return quadrature::integrate(integrand, lo, cfg.t_max, panel_count(cfg), rule);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TransitionConfig TransitionConfig::with_detuning(double delta) const {
  TransitionConfig out = *this;
  out.energy_final = energy_initial + omega + omega_prime + delta;
  return out;
}

void TransitionConfig::validate() const {
  if (!std::isfinite(epsilon) || !std::isfinite(eta) || !(eta > 0.0) || !(epsilon > eta)) {
    throw std::domain_error(
        "TransitionConfig: regulators must satisfy epsilon > eta > 0 "
        "(the outer integral diverges otherwise)");
  }
  if (!std::isfinite(rho) || rho < 0.0) {
    throw std::domain_error("TransitionConfig: rho must be >= 0");
  }
  if (!std::isfinite(t_max) || !(t_max > 0.0)) {
    throw std::domain_error("TransitionConfig: t_max must be > 0");
  }
  if (!std::isfinite(energy_initial) || !std::isfinite(energy_final) || !std::isfinite(omega) ||
      !std::isfinite(omega_prime)) {
    throw std::domain_error("TransitionConfig: energies must be finite");
  }
}

Complex retarded_amplitude(const TransitionConfig& cfg, EvalMode mode) {
  cfg.validate();
  const double a = outer_frequency(cfg);
  const double b = inner_frequency(cfg);
  const Complex p = cfg.eta - kI * b;  // inner exponent coefficient
  const Complex inner_prefactor = std::exp(-p * cfg.rho) / p;
  if (mode == EvalMode::analytic) {
    const Complex denominator = (cfg.epsilon - cfg.eta) - kI * cfg.detuning();
    return inner_prefactor / denominator;
  }
  return outer_quadrature(cfg, 0.0, [&](double t) {
    return std::exp((-cfg.epsilon + p.real()) * t + kI * ((a - b) * t)) * inner_prefactor;
  });
}

Complex advanced_amplitude(const TransitionConfig& cfg, EvalMode mode) {
  cfg.validate();
  const double a = outer_frequency(cfg);
  const double b = inner_frequency(cfg);
  const Complex q = cfg.eta + kI * b;
  const Complex inner_prefactor = std::exp(-q * cfg.rho) / q;
  if (mode == EvalMode::analytic) {
    const Complex denominator = (cfg.epsilon + cfg.eta) - kI * cfg.detuning();
    return inner_prefactor / denominator;
  }
  return outer_quadrature(cfg, 0.0, [&](double t) {
    return std::exp((-cfg.epsilon - cfg.eta) * t + kI * ((a - b) * t)) * inner_prefactor;
  });
}

Complex signal_linked_retarded_amplitude(const TransitionConfig& cfg) {
  cfg.validate();
  if (cfg.rho >= cfg.t_max) return Complex{};  // empty inner range everywhere
  const double a = outer_frequency(cfg);
  const double b = inner_frequency(cfg);
  const Complex p = cfg.eta - kI * b;
  // Outer integrand e^{z2 t} (e^{p (t - rho)} - 1) / p for t in [rho, t_max].
  const Complex z2 = -cfg.epsilon + kI * a;
  const Complex z1 = z2 + p;
  auto segment = [](Complex z, double lo, double hi) {
    return (std::exp(z * hi) - std::exp(z * lo)) / z;
  };
  const Complex first = std::exp(-p * cfg.rho) * segment(z1, cfg.rho, cfg.t_max);
  const Complex second = segment(z2, cfg.rho, cfg.t_max);
  return (first - second) / p;
}

Complex epr_retarded_amplitude(const TransitionConfig& cfg, EvalMode mode) {
  TransitionConfig unlinked = cfg;
  unlinked.rho = 0.0;
  return retarded_amplitude(unlinked, mode);
}

AmplitudeScan scan_delta(const TransitionConfig& base, double delta_lo, double delta_hi,
                         std::size_t n_points, ScanVariant which) {
  base.validate();
  if (n_points < 11) throw std::domain_error("scan_delta: need at least 11 points");
  if (!(delta_lo < delta_hi) || !(delta_lo <= 0.0 && 0.0 <= delta_hi)) {
    throw std::domain_error("scan_delta: interval must contain 0");
  }

  AmplitudeScan scan;
  scan.deltas.resize(n_points);
  scan.magnitudes.resize(n_points);
  const double step = (delta_hi - delta_lo) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double delta = delta_lo + step * static_cast<double>(i);
    const TransitionConfig cfg = base.with_detuning(delta);
    Complex amp;
    switch (which) {
      case ScanVariant::retarded:
        amp = retarded_amplitude(cfg, EvalMode::analytic);
        break;
      case ScanVariant::advanced:
        amp = advanced_amplitude(cfg, EvalMode::analytic);
        break;
      case ScanVariant::signal_linked:
        amp = signal_linked_retarded_amplitude(cfg);
        break;
    }
    scan.deltas[i] = delta;
    scan.magnitudes[i] = std::abs(amp);
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n_points; ++i) {
    if (scan.magnitudes[i] > scan.magnitudes[peak]) peak = i;
  }
  scan.peak_delta = scan.deltas[peak];
  scan.peak_magnitude = scan.magnitudes[peak];

  // sqrt(2)-fall points on each side, linearly interpolated.
  const double target = scan.peak_magnitude / std::sqrt(2.0);
  auto crossing = [&](bool rightward) -> double {
    std::size_t i = peak;
    while (true) {
      const std::size_t next = rightward ? i + 1 : i - 1;
      if ((rightward && next >= n_points) || (!rightward && i == 0)) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (scan.magnitudes[next] <= target) {
        const double m0 = scan.magnitudes[i];
        const double m1 = scan.magnitudes[next];
        const double frac = (m0 - target) / (m0 - m1);
        return scan.deltas[i] + frac * (scan.deltas[next] - scan.deltas[i]);
      }
      i = next;
    }
  };
  const double right = crossing(true);
  const double left = crossing(false);
  scan.half_width = 0.5 * (right - left);
  return scan;
}

RegulatorSweep regulator_sweep(const TransitionConfig& base,
                               const std::vector<double>& scale_factors) {
  base.validate();
  if (scale_factors.size() < 2) {
    throw std::domain_error("regulator_sweep: need at least two scale factors");
  }
  RegulatorSweep sweep;
  std::vector<double> log_gap, log_ret, log_adv;
  for (double f : scale_factors) {
    TransitionConfig cfg = base.with_detuning(0.0);
    cfg.epsilon = base.epsilon * f;
    cfg.eta = base.eta * f;
    cfg.validate();
    const double gap = cfg.epsilon - cfg.eta;
    const double ret = std::abs(retarded_amplitude(cfg, EvalMode::analytic));
    const double adv = std::abs(advanced_amplitude(cfg, EvalMode::analytic));
    sweep.eps_minus_eta.push_back(gap);
    sweep.peak_retarded.push_back(ret);
    sweep.peak_advanced.push_back(adv);
    log_gap.push_back(std::log(gap));
    log_ret.push_back(std::log(ret));
    log_adv.push_back(std::log(adv));
  }
  sweep.slope_retarded = least_squares_slope(log_gap, log_ret);
  sweep.slope_advanced = least_squares_slope(log_gap, log_adv);
  return sweep;
}

}  // namespace cmblab::arrow
