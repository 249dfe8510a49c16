#include "cmblab/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cmblab/constants.hpp"
#include "cmblab/rng.hpp"

namespace cmblab::nonlocal {

namespace {

void require_same_lattice(const Lattice& a, const Lattice& b, const char* what) {
  if (!(a == b)) throw std::domain_error(std::string(what) + ": lattice mismatch");
}

void require_direction(int mu) {
  if (mu != 0 && mu != 1) throw std::domain_error("direction index must be 0 or 1");
}

// Neighbor site in +/- direction mu with periodic wraparound; step is -1 or +1.
std::size_t shifted_site(const Lattice& lat, std::size_t s, int mu, int step) {
  std::size_t it = s / lat.n_z;
  std::size_t iz = s % lat.n_z;
  const std::size_t hop = static_cast<std::size_t>(step);  // unsigned wrap handles -1
  if (mu == 0) {
    it = (it + lat.n_t + hop) % lat.n_t;
  } else {
    iz = (iz + lat.n_z + hop) % lat.n_z;
  }
  return it * lat.n_z + iz;
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

Lattice::Lattice(std::size_t n_t_in, std::size_t n_z_in, double h_t_in, double h_z_in)
    : n_t(n_t_in), n_z(n_z_in), h_t(h_t_in), h_z(h_z_in) {
  if (n_t < 8 || n_z < 8) throw std::domain_error("Lattice: need at least 8 sites per direction");
  if (!(h_t > 0.0) || !(h_z > 0.0)) throw std::domain_error("Lattice: spacings must be > 0");
}

ScalarField::ScalarField(const Lattice& lattice) : lattice_(lattice), values_(lattice.sites()) {}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

Kernel::Kernel(const Lattice& lattice)
    : lattice_(lattice), dim_(lattice.sites()), values_(dim_ * dim_) {}

Kernel Kernel::identity(const Lattice& lattice) {
  Kernel k(lattice);
  const double inv_vol = 1.0 / lattice.volume_element();
  for (std::size_t s = 0; s < k.dim(); ++s) k.at(s, s) = inv_vol;
  return k;
}

double Kernel::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

Kernel add(const Kernel& a, const Kernel& b) {
  require_same_lattice(a.lattice(), b.lattice(), "add");
  Kernel out(a.lattice());
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    out.values()[i] = a.values()[i] + b.values()[i];
  }
  return out;
}

Kernel subtract(const Kernel& a, const Kernel& b) {
  require_same_lattice(a.lattice(), b.lattice(), "subtract");
  Kernel out(a.lattice());
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    out.values()[i] = a.values()[i] - b.values()[i];
  }
  return out;
}

PotentialKernel::PotentialKernel(Kernel c0, Kernel c1)
    : component0(std::move(c0)), component1(std::move(c1)) {
  require_same_lattice(component0.lattice(), component1.lattice(), "PotentialKernel");
}

const Kernel& PotentialKernel::component(int mu) const {
  require_direction(mu);
  return mu == 0 ? component0 : component1;
}

Kernel FieldTensor::component(int mu, int nu) const {
  require_direction(mu);
  require_direction(nu);
  if (mu == nu) return Kernel(f01_.lattice());
  if (mu == 0) return f01_;
  Kernel out(f01_.lattice());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] = -f01_.values()[i];
  return out;
}

CommutationControl CommutationControl::standard() { return CommutationControl{}; }

CommutationControl CommutationControl::broken_sinusoidal(const Lattice& lattice,
                                                         double amplitude) {
  std::vector<double> f(lattice.sites());
  for (std::size_t it = 0; it < lattice.n_t; ++it) {
    const double t = static_cast<double>(it) * lattice.h_t;
    const double s = 1.0 + amplitude * std::sin(2.0 * constants::pi * t / lattice.extent_t());
    for (std::size_t iz = 0; iz < lattice.n_z; ++iz) f[lattice.site(it, iz)] = s;
  }
  return broken(lattice, std::move(f));
}

CommutationControl CommutationControl::broken(const Lattice& lattice,
                                              std::vector<double> factor_by_site) {
  if (factor_by_site.size() != lattice.sites()) {
    throw std::domain_error("CommutationControl: factor size must match lattice sites");
  }
  CommutationControl c;
  c.broken_ = true;
  c.factors_ = std::move(factor_by_site);
  return c;
}

ScalarField apply_kernel(const Kernel& kernel, const ScalarField& phi) {
  require_same_lattice(kernel.lattice(), phi.lattice(), "apply_kernel");
  const std::size_t n = kernel.dim();
  const double vol = kernel.lattice().volume_element();
  ScalarField out(kernel.lattice());
  for (std::size_t s = 0; s < n; ++s) {
    Complex acc{};
    const Complex* row = &kernel.at(s, 0);
    for (std::size_t sp = 0; sp < n; ++sp) acc += row[sp] * phi[sp];
    out[s] = acc * vol;
  }
  return out;
}

Kernel compose_kernels(const Kernel& p, const Kernel& q) {
  require_same_lattice(p.lattice(), q.lattice(), "compose_kernels");
  const std::size_t n = p.dim();
  const double vol = p.lattice().volume_element();
  Kernel out(p.lattice());
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t sp = 0; sp < n; ++sp) {
      const Complex pv = p.at(s, sp);
      if (pv == Complex{}) continue;
      const Complex scaled = pv * vol;
      const Complex* qrow = &q.at(sp, 0);
      Complex* orow = &out.at(s, 0);
      for (std::size_t spp = 0; spp < n; ++spp) orow[spp] += scaled * qrow[spp];
    }
  }
  return out;
}

Kernel derivative_x(const Kernel& kernel, int mu) {
  require_direction(mu);
  const Lattice& lat = kernel.lattice();
  const std::size_t n = kernel.dim();
  const double inv2h = 1.0 / (2.0 * lat.spacing(mu));
  Kernel out(lat);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t sp_plus = shifted_site(lat, s, mu, +1);
    const std::size_t sp_minus = shifted_site(lat, s, mu, -1);
    const Complex* rp = &kernel.at(sp_plus, 0);
    const Complex* rm = &kernel.at(sp_minus, 0);
    Complex* row = &out.at(s, 0);
    for (std::size_t c = 0; c < n; ++c) row[c] = (rp[c] - rm[c]) * inv2h;
  }
  return out;
}

Kernel derivative_xprime(const Kernel& kernel, int mu, const CommutationControl& control) {
  require_direction(mu);
  const Lattice& lat = kernel.lattice();
  const std::size_t n = kernel.dim();
  const double inv2h = 1.0 / (2.0 * lat.spacing(mu));
  Kernel out(lat);
  std::vector<std::size_t> plus(n), minus(n);
  for (std::size_t sp = 0; sp < n; ++sp) {
    plus[sp] = shifted_site(lat, sp, mu, +1);
    minus[sp] = shifted_site(lat, sp, mu, -1);
  }
  if (control.is_broken() && control.factors().size() != n) {
    throw std::domain_error("derivative_xprime: control factor size mismatch");
  }
  for (std::size_t s = 0; s < n; ++s) {
    const Complex* row_in = &kernel.at(s, 0);
    Complex* row = &out.at(s, 0);
    const double scale = control.is_broken() ? control.factors()[s] * inv2h : inv2h;
    for (std::size_t sp = 0; sp < n; ++sp) {
      row[sp] = (row_in[plus[sp]] - row_in[minus[sp]]) * scale;
    }
  }
  return out;
}

ScalarField derivative_field(const ScalarField& phi, int mu) {
  require_direction(mu);
  const Lattice& lat = phi.lattice();
  const double inv2h = 1.0 / (2.0 * lat.spacing(mu));
  ScalarField out(lat);
  for (std::size_t s = 0; s < phi.size(); ++s) {
    out[s] = (phi[shifted_site(lat, s, mu, +1)] - phi[shifted_site(lat, s, mu, -1)]) * inv2h;
  }
  return out;
}

double commutator_residual(const Kernel& kernel, int mu, int nu,
                           const CommutationControl& control) {
  require_direction(mu);
  require_direction(nu);
  const double norm = kernel.max_abs();
  if (norm == 0.0) {
    throw std::domain_error("commutator_residual: zero kernel has no relative norm");
  }
  const Kernel forward = derivative_x(derivative_xprime(kernel, nu, control), mu);
  const Kernel reverse = derivative_xprime(derivative_x(kernel, mu), nu, control);
  return subtract(forward, reverse).max_abs() / norm;
}

PotentialKernel transform_potential(const PotentialKernel& a, const Kernel& lambda,
                                    const CommutationControl& control) {
  require_same_lattice(a.component0.lattice(), lambda.lattice(), "transform_potential");
  Kernel c0 = add(a.component0, add(derivative_x(lambda, 0), derivative_xprime(lambda, 0, control)));
  Kernel c1 = add(a.component1, add(derivative_x(lambda, 1), derivative_xprime(lambda, 1, control)));
  return PotentialKernel(std::move(c0), std::move(c1));
}

FieldTensor field_tensor(const PotentialKernel& a, const CommutationControl& control) {
  Kernel f01 = subtract(add(derivative_x(a.component1, 0), derivative_xprime(a.component1, 0, control)),
                        add(derivative_x(a.component0, 1), derivative_xprime(a.component0, 1, control)));
  return FieldTensor(std::move(f01));
}

double gauge_invariance_residual(const PotentialKernel& a, const Kernel& lambda,
                                 const CommutationControl& control) {
  const FieldTensor before = field_tensor(a, control);
  const FieldTensor after = field_tensor(transform_potential(a, lambda, control), control);
  const double num = subtract(after.component01(), before.component01()).max_abs();
  const double den = std::max(before.component01().max_abs(), 1e-300);
  return num / den;
}

ScalarField covariant_derivative(const ScalarField& phi, const PotentialKernel& a, int mu,
                                 double coupling) {
  require_direction(mu);
  require_same_lattice(phi.lattice(), a.component0.lattice(), "covariant_derivative");
  ScalarField gradient = derivative_field(phi, mu);
  const ScalarField coupled = apply_kernel(a.component(mu), phi);
  const Complex ie(0.0, coupling);
  for (std::size_t s = 0; s < gradient.size(); ++s) gradient[s] += ie * coupled[s];
  return gradient;
}

double covariance_residual(const ScalarField& phi, const PotentialKernel& a, const Kernel& lambda,
                           double coupling) {
  if (!(coupling >= 0.0)) throw std::domain_error("covariance_residual: coupling must be >= 0");
  require_same_lattice(phi.lattice(), lambda.lattice(), "covariance_residual");
  const Complex ie(0.0, coupling);

  // phi' = phi - i e (Lambda phi); A' from the standard transformation.
  const ScalarField lambda_phi = apply_kernel(lambda, phi);
  ScalarField phi_prime(phi.lattice());
  for (std::size_t s = 0; s < phi.size(); ++s) phi_prime[s] = phi[s] - ie * lambda_phi[s];
  const PotentialKernel a_prime = transform_potential(a, lambda);

  double worst = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const ScalarField d = covariant_derivative(phi, a, mu, coupling);
    const ScalarField d_prime = covariant_derivative(phi_prime, a_prime, mu, coupling);
    const ScalarField lambda_d = apply_kernel(lambda, d);
    double local = 0.0;
    for (std::size_t s = 0; s < phi.size(); ++s) {
      const Complex expected = d[s] - ie * lambda_d[s];
      local = std::max(local, std::abs(d_prime[s] - expected));
    }
    worst = std::max(worst, local);
  }
  return worst;
}

ScalarField random_smooth_field(const Lattice& lattice, std::uint64_t seed, int n_modes,
                                int max_mode) {
  std::mt19937_64 gen(seed);
  ScalarField out(lattice);
  for (int m = 0; m < n_modes; ++m) {
    const int kt = rng::uniform_int(gen, -max_mode, max_mode);
    const int kz = rng::uniform_int(gen, -max_mode, max_mode);
    const Complex coeff(rng::standard_normal(gen), rng::standard_normal(gen));
    for (std::size_t it = 0; it < lattice.n_t; ++it) {
      for (std::size_t iz = 0; iz < lattice.n_z; ++iz) {
        const double phase = 2.0 * constants::pi *
                             (kt * static_cast<double>(it) / static_cast<double>(lattice.n_t) +
                              kz * static_cast<double>(iz) / static_cast<double>(lattice.n_z));
        out[lattice.site(it, iz)] += coeff * std::polar(1.0, phase);
      }
    }
  }
  return out;
}

Kernel random_smooth_kernel(const Lattice& lattice, std::uint64_t seed, int n_modes,
                            int max_mode) {
  std::mt19937_64 gen(seed);
  const std::size_t n = lattice.sites();
  Kernel out(lattice);
  std::vector<Complex> u(n), v(n);
  for (int m = 0; m < n_modes; ++m) {
    const int kt = rng::uniform_int(gen, -max_mode, max_mode);
    const int kz = rng::uniform_int(gen, -max_mode, max_mode);
    const int kpt = rng::uniform_int(gen, -max_mode, max_mode);
    const int kpz = rng::uniform_int(gen, -max_mode, max_mode);
    const Complex coeff(rng::standard_normal(gen), rng::standard_normal(gen));
    for (std::size_t it = 0; it < lattice.n_t; ++it) {
      for (std::size_t iz = 0; iz < lattice.n_z; ++iz) {
        const double phase_u = 2.0 * constants::pi *
                               (kt * static_cast<double>(it) / static_cast<double>(lattice.n_t) +
                                kz * static_cast<double>(iz) / static_cast<double>(lattice.n_z));
        const double phase_v = 2.0 * constants::pi *
                               (kpt * static_cast<double>(it) / static_cast<double>(lattice.n_t) +
                                kpz * static_cast<double>(iz) / static_cast<double>(lattice.n_z));
        u[lattice.site(it, iz)] = std::polar(1.0, phase_u);
        v[lattice.site(it, iz)] = std::polar(1.0, phase_v);
      }
    }
    for (std::size_t s = 0; s < n; ++s) {
      const Complex cu = coeff * u[s];
      Complex* row = &out.at(s, 0);
      for (std::size_t sp = 0; sp < n; ++sp) row[sp] += cu * v[sp];
    }
  }
  return out;
}

GaugeCheckReport run_gauge_checks(const GaugeCheckConfig& config) {
  if (config.trials < 1) throw std::domain_error("run_gauge_checks: need at least one trial");
  if (config.couplings.size() < 2) {
    throw std::domain_error("run_gauge_checks: need at least two couplings for a slope");
  }
  GaugeCheckReport report;
  report.config = config;
  const CommutationControl broken =
      CommutationControl::broken_sinusoidal(config.lattice, config.broken_amplitude);

  double max_std_comm = 0.0;
  double min_broken_comm = std::numeric_limits<double>::infinity();
  double max_std_inv = 0.0;
  double min_broken_inv = std::numeric_limits<double>::infinity();

  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t base = config.seed + 7919ull * static_cast<std::uint64_t>(trial);
    const Kernel a0 = random_smooth_kernel(config.lattice, base + 1);
    const Kernel a1 = random_smooth_kernel(config.lattice, base + 2);
    const Kernel lambda = random_smooth_kernel(config.lattice, base + 3);
    const PotentialKernel a(a0, a1);

    double broken_comm = 0.0;
    for (int mu = 0; mu < 2; ++mu) {
      for (int nu = 0; nu < 2; ++nu) {
        max_std_comm = std::max(max_std_comm, commutator_residual(lambda, mu, nu));
        broken_comm = std::max(broken_comm, commutator_residual(lambda, mu, nu, broken));
      }
    }
    min_broken_comm = std::min(min_broken_comm, broken_comm);

    max_std_inv = std::max(max_std_inv, gauge_invariance_residual(a, lambda));
    min_broken_inv = std::min(min_broken_inv, gauge_invariance_residual(a, lambda, broken));
  }

  report.max_standard_commutator = max_std_comm;
  report.min_broken_commutator = min_broken_comm;
  report.max_standard_invariance = max_std_inv;
  report.min_broken_invariance = min_broken_inv;

  // Covariance order measured on one seeded draw across the coupling ladder.
  const ScalarField phi = random_smooth_field(config.lattice, config.seed + 101);
  const Kernel a0 = random_smooth_kernel(config.lattice, config.seed + 102);
  const Kernel a1 = random_smooth_kernel(config.lattice, config.seed + 103);
  const Kernel lambda = random_smooth_kernel(config.lattice, config.seed + 104);
  const PotentialKernel a(a0, a1);
  std::vector<double> log_e, log_r;
  for (double e : config.couplings) {
    const double r = covariance_residual(phi, a, lambda, e);
    report.covariance_residuals.push_back(r);
    log_e.push_back(std::log(e));
    log_r.push_back(std::log(r));
  }
  report.covariance_slope = least_squares_slope(log_e, log_r);

  report.pass_standard = max_std_comm <= 1e-12 && max_std_inv <= 1e-12;
  report.pass_broken = min_broken_comm >= 1e-3 && min_broken_inv >= 1e-3;
  report.pass_covariance = std::abs(report.covariance_slope - 2.0) <= 0.1;
  return report;
}

}  // namespace cmblab::nonlocal
