#include "cmblab/distortion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cmblab/rng.hpp"

namespace cmblab::distortion {

namespace {

using radiometry::planck_energy_density;
using radiometry::planck_peak_frequency;

double model_value(double nu, double t_kelvin, double alpha) {
  const Temperature t(t_kelvin);
  return planck_energy_density(nu, t) - alpha * planck_energy_density(0.5 * nu, t);
}

std::vector<double> fit_weights(const SpectrumSamples& samples) {
  std::vector<double> w(samples.grid.size(), 1.0);
  if (samples.sigmas) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double s = (*samples.sigmas)[i];
      if (s <= 0.0) {
        throw std::domain_error("fit: sigmas must be strictly positive when present");
      }
      w[i] = 1.0 / (s * s);
    }
  }
  return w;
}

double weighted_sse(const SpectrumSamples& samples, const std::vector<double>& w, double t_kelvin,
                    double alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    const double r = samples.values[i] - model_value(samples.grid[i], t_kelvin, alpha);
    acc += w[i] * r * r;
  }
  return acc;
}

double weighted_rms(const SpectrumSamples& samples, const std::vector<double>& w, double t_kelvin,
                    double alpha) {
  double sw = 0.0;
  for (double wi : w) sw += wi;
  return std::sqrt(weighted_sse(samples, w, t_kelvin, alpha) / sw);
}

struct Scalar1dFit {
  double x = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Coarse scan plus golden-section refinement on [lo, hi]. Ties in the scan
// break toward the lower abscissa so results are order-independent.
template <typename F>
Scalar1dFit minimize_scalar(F&& f, double lo, double hi, int scan_points) {
  Scalar1dFit out;
  if (lo == hi) {
    out.x = lo;
    out.objective = f(lo);
    out.converged = true;
    return out;
  }

  const double span = hi - lo;
  int best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double x = lo + span * static_cast<double>(i) / static_cast<double>(scan_points - 1);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best = i;
    }
  }
  auto grid_x = [&](int i) {
    return lo + span * static_cast<double>(i) / static_cast<double>(scan_points - 1);
  };
  double a = grid_x(std::max(best - 1, 0));
  double b = grid_x(std::min(best + 1, scan_points - 1));

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  const double tol = 1e-12 * span;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  const int cap = 200;
  int it = 0;
  while (b - a > tol && it < cap) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++it;
  }
  out.iterations = it;
  out.converged = (b - a) <= tol;
  out.x = f1 <= f2 ? x1 : x2;
  out.objective = std::min(f1, f2);
  return out;
}

void validate_for_fit(const SpectrumSamples& samples, std::size_t min_samples) {
  if (samples.grid.size() < min_samples) {
    throw std::domain_error("fit: need at least " + std::to_string(min_samples) + " samples");
  }
  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : samples.values) vmax = std::max(vmax, v);
  // A distorted spectrum may dip below zero at its high-frequency tail, so
  // only an entirely non-positive data set is rejected.
  if (!(vmax > 0.0)) {
    throw std::domain_error("fit: samples carry no positive signal");
  }
}

bool is_degenerate(const SpectrumSamples& samples) {
  for (double v : samples.values) {
    if (v != samples.values.front()) return false;
  }
  return true;
}

// Variance estimates diag((J^T W J)^-1) from a finite-difference Jacobian.
std::optional<std::vector<double>> covariance_two_param(const SpectrumSamples& samples,
                                                        const std::vector<double>& w,
                                                        double t_kelvin, double alpha) {
  const double ht = 1e-7 * t_kelvin;
  double stt = 0.0, saa = 0.0, sta = 0.0;
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    const double nu = samples.grid[i];
    const double jt =
        (model_value(nu, t_kelvin + ht, alpha) - model_value(nu, t_kelvin - ht, alpha)) /
        (2.0 * ht);
    const double ja = -planck_energy_density(0.5 * nu, Temperature(t_kelvin));
    stt += w[i] * jt * jt;
    saa += w[i] * ja * ja;
    sta += w[i] * jt * ja;
  }
  const double det = stt * saa - sta * sta;
  if (!(det > 0.0)) return std::nullopt;
  return std::vector<double>{saa / det, stt / det};
}

std::optional<std::vector<double>> covariance_one_param(const SpectrumSamples& samples,
                                                        const std::vector<double>& w,
                                                        double t_kelvin) {
  const double ht = 1e-7 * t_kelvin;
  double stt = 0.0;
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    const double nu = samples.grid[i];
    const double jt = (model_value(nu, t_kelvin + ht, 0.0) - model_value(nu, t_kelvin - ht, 0.0)) /
                      (2.0 * ht);
    stt += w[i] * jt * jt;
  }
  if (!(stt > 0.0)) return std::nullopt;
  return std::vector<double>{1.0 / stt};
}

// Bounded coordinate for Nelder-Mead: p(theta) = lo + width sin^2(theta).
struct BoundMap {
  double lo, width;
  double value(double theta) const {
    const double s = std::sin(theta);
    return lo + width * s * s;
  }
  double angle(double p) const {
    const double u = std::clamp((p - lo) / width, 0.0, 1.0);
    return std::asin(std::sqrt(u));
  }
};

struct NelderMead2d {
  std::array<double, 2> x = {0.0, 0.0};
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <typename F>
NelderMead2d nelder_mead_2d(F&& f, std::array<double, 2> start, double step) {
  using Point = std::array<double, 2>;
  struct Vertex {
    Point x;
    double f;
  };
  std::array<Vertex, 3> s;
  s[0] = {start, f(start)};
  s[1] = {{start[0] + step, start[1]}, 0.0};
  s[1].f = f(s[1].x);
  s[2] = {{start[0], start[1] + step}, 0.0};
  s[2].f = f(s[2].x);

  auto order = [&s]() {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
      if (a.f != b.f) return a.f < b.f;
      if (a.x[0] != b.x[0]) return a.x[0] < b.x[0];
      return a.x[1] < b.x[1];
    });
  };

  NelderMead2d out;
  const int cap = 500;
  int it = 0;
  for (; it < cap; ++it) {
    order();
    const double spread = s[2].f - s[0].f;
    const double size = std::max(std::abs(s[2].x[0] - s[0].x[0]) + std::abs(s[1].x[0] - s[0].x[0]),
                                 std::abs(s[2].x[1] - s[0].x[1]) + std::abs(s[1].x[1] - s[0].x[1]));
    if (spread <= 1e-10 * (std::abs(s[0].f) + 1e-300) || size <= 1e-12) {
      out.converged = true;
      break;
    }
    const Point centroid = {0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
    auto blend = [&](double coeff) {
      return Point{centroid[0] + coeff * (centroid[0] - s[2].x[0]),
                   centroid[1] + coeff * (centroid[1] - s[2].x[1])};
    };
    const Point xr = blend(1.0);
    const double fr = f(xr);
    if (fr < s[0].f) {
      const Point xe = blend(2.0);
      const double fe = f(xe);
      if (fe < fr) {
        s[2] = {xe, fe};
      } else {
        s[2] = {xr, fr};
      }
    } else if (fr < s[1].f) {
      s[2] = {xr, fr};
    } else {
      const bool outside = fr < s[2].f;
      const Point xc = blend(outside ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : s[2].f)) {
        s[2] = {xc, fc};
      } else {
        // Shrink toward the best vertex.
        for (int k = 1; k < 3; ++k) {
          s[k].x = {s[0].x[0] + 0.5 * (s[k].x[0] - s[0].x[0]),
                    s[0].x[1] + 0.5 * (s[k].x[1] - s[0].x[1])};
          s[k].f = f(s[k].x);
        }
      }
    }
  }
  order();
  out.x = s[0].x;
  out.objective = s[0].f;
  out.iterations = it;
  return out;
}

}  // namespace

DistortionModel::DistortionModel(Temperature temperature, double alpha)
    : temperature_(temperature), alpha_(alpha) {
  if (temperature.kelvin() <= 0.0) {
    throw std::domain_error("DistortionModel: temperature must be > 0");
  }
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha >= 1.0) {
    throw std::domain_error("DistortionModel: alpha must lie in [0, 1)");
  }
}

SpectrumSamples distorted_spectrum(const SpectralGrid& grid, const DistortionModel& model) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = planck_energy_density(grid[i], model.temperature()) -
                model.alpha() * planck_energy_density(0.5 * grid[i], model.temperature());
  }
  return SpectrumSamples(grid, std::move(values));
}

SpectrumSamples deviation_profile(const SpectralGrid& grid, const DistortionModel& model) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = model.alpha() * planck_energy_density(0.5 * grid[i], model.temperature());
  }
  return SpectrumSamples(grid, std::move(values));
}

double peak_deviation_frequency(Temperature temperature) {
  // F(nu) is proportional to E(nu/2), so its maximum sits at 2 nu_p for any
  // alpha > 0.
  return 2.0 * planck_peak_frequency(temperature);
}

FitResult fit_planck_temperature(const SpectrumSamples& samples) {
  return fit_planck_temperature(samples, ParameterBox{}.t_lo_kelvin, ParameterBox{}.t_hi_kelvin);
}

FitResult fit_planck_temperature(const SpectrumSamples& samples, double t_lo_kelvin,
                                 double t_hi_kelvin) {
  validate_for_fit(samples, 3);
  if (!(t_lo_kelvin > 0.0) || !(t_lo_kelvin <= t_hi_kelvin)) {
    throw std::domain_error("fit_planck_temperature: invalid temperature bounds");
  }
  const std::vector<double> w = fit_weights(samples);
  auto objective = [&](double t) { return weighted_sse(samples, w, t, 0.0); };
  const Scalar1dFit fit = minimize_scalar(objective, t_lo_kelvin, t_hi_kelvin, 256);

  FitResult out{Temperature(fit.x), std::nullopt, weighted_rms(samples, w, fit.x, 0.0),
                fit.iterations, fit.converged, covariance_one_param(samples, w, fit.x)};
  return out;
}

FitResult fit_distortion(const SpectrumSamples& samples, const ParameterBox& box) {
  validate_for_fit(samples, 4);
  if (is_degenerate(samples)) {
    throw std::domain_error("fit_distortion: degenerate data (all values equal)");
  }
  if (!(box.t_lo_kelvin > 0.0) || !(box.t_lo_kelvin <= box.t_hi_kelvin)) {
    throw std::domain_error("fit_distortion: invalid temperature bounds");
  }
  if (!(box.alpha_lo >= 0.0) || !(box.alpha_lo <= box.alpha_hi) || !(box.alpha_hi < 1.0)) {
    throw std::domain_error("fit_distortion: invalid alpha bounds");
  }
  const std::vector<double> w = fit_weights(samples);
  auto objective = [&](double t, double a) { return weighted_sse(samples, w, t, a); };

  // Degenerate boxes collapse to one-dimensional refinement.
  if (box.alpha_lo == box.alpha_hi) {
    const double a = box.alpha_lo;
    const Scalar1dFit fit = minimize_scalar([&](double t) { return objective(t, a); },
                                            box.t_lo_kelvin, box.t_hi_kelvin, 256);
    return FitResult{Temperature(fit.x), a, weighted_rms(samples, w, fit.x, a), fit.iterations,
                     fit.converged, covariance_two_param(samples, w, fit.x, a)};
  }
  if (box.t_lo_kelvin == box.t_hi_kelvin) {
    const double t = box.t_lo_kelvin;
    const Scalar1dFit fit = minimize_scalar([&](double a) { return objective(t, a); },
                                            box.alpha_lo, box.alpha_hi, 256);
    return FitResult{Temperature(t), fit.x, weighted_rms(samples, w, t, fit.x), fit.iterations,
                     fit.converged, covariance_two_param(samples, w, t, fit.x)};
  }

  // Fixed 64 x 32 coarse grid over the box; ties break toward lower T then
  // lower alpha so that evaluation order never matters.
  const int nt = 64, na = 32;
  double best_t = box.t_lo_kelvin, best_a = box.alpha_lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nt; ++i) {
    const double t =
        box.t_lo_kelvin + (box.t_hi_kelvin - box.t_lo_kelvin) * static_cast<double>(i) / (nt - 1);
    for (int j = 0; j < na; ++j) {
      const double a = box.alpha_lo + (box.alpha_hi - box.alpha_lo) * static_cast<double>(j) / (na - 1);
      const double fx = objective(t, a);
      if (fx < best_f) {
        best_f = fx;
        best_t = t;
        best_a = a;
      }
    }
  }

  // Derivative-free refinement in bounded coordinates.
  const BoundMap tmap{box.t_lo_kelvin, box.t_hi_kelvin - box.t_lo_kelvin};
  const BoundMap amap{box.alpha_lo, box.alpha_hi - box.alpha_lo};
  auto theta_objective = [&](std::array<double, 2> th) {
    return objective(tmap.value(th[0]), amap.value(th[1]));
  };
  const NelderMead2d nm =
      nelder_mead_2d(theta_objective, {tmap.angle(best_t), amap.angle(best_a)}, 0.05);
  double cand_t = tmap.value(nm.x[0]);
  double cand_a = amap.value(nm.x[1]);
  double cand_f = nm.objective;
  int iterations = nm.iterations;
  bool converged = nm.converged;

  // The alpha = alpha_lo profile fit is kept as an extra multi-start
  // candidate; with alpha_lo = 0 this makes the nested-model property hold
  // by construction.
  const Scalar1dFit profile = minimize_scalar([&](double t) { return objective(t, box.alpha_lo); },
                                              box.t_lo_kelvin, box.t_hi_kelvin, 256);
  iterations += profile.iterations;
  const bool profile_better =
      profile.objective < cand_f ||
      (profile.objective == cand_f &&
       (profile.x < cand_t || (profile.x == cand_t && box.alpha_lo < cand_a)));
  if (profile_better) {
    cand_t = profile.x;
    cand_a = box.alpha_lo;
    cand_f = profile.objective;
    converged = profile.converged;
  }

  return FitResult{Temperature(cand_t),
                   cand_a,
                   weighted_rms(samples, w, cand_t, cand_a),
                   iterations,
                   converged,
                   covariance_two_param(samples, w, cand_t, cand_a)};
}

SpectrumSamples synthesize_observation(const DistortionModel& model, const SpectralGrid& grid,
                                       double noise_rel, std::uint64_t seed) {
  if (!std::isfinite(noise_rel) || noise_rel < 0.0) {
    throw std::domain_error("synthesize_observation: noise_rel must be >= 0");
  }
  SpectrumSamples clean = distorted_spectrum(grid, model);
  if (noise_rel == 0.0) return clean;

  std::mt19937_64 gen(seed);
  std::vector<double> values(grid.size());
  std::vector<double> sigmas(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = rng::standard_normal(gen);
    values[i] = clean.values[i] * (1.0 + noise_rel * z);
    // |G| keeps the 1-sigma scale non-negative on the tail where G < 0.
    sigmas[i] = noise_rel * std::abs(clean.values[i]);
  }
  return SpectrumSamples(grid, std::move(values), std::move(sigmas));
}

}  // namespace cmblab::distortion
