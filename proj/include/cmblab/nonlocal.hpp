#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

// Non-local operator calculus on a periodic 1+1-D lattice. Two-point
// kernels K(x, x') act on site fields by volume-weighted summation over the
// second argument; derivatives are periodic central differences acting on
// either the first (x) or second (x') slot. Because the two slots are
// independent index sets, the x- and x'-derivatives commute to rounding,
// which makes the gauge transformation
//
//   A_mu  ->  A_mu + D_x Lambda + D_x' Lambda
//
// an exact symmetry of the two-slot field tensor on this discretization.
// A deliberately broken x'-derivative (scaled by a site-dependent factor
// s(x)) destroys the commutation and with it the invariance, which is the
// necessity half of the check.

namespace cmblab::nonlocal {

using Complex = std::complex<double>;

struct Lattice {
  std::size_t n_t = 16;
  std::size_t n_z = 16;
  double h_t = 1.0 / 16.0;
  double h_z = 1.0 / 16.0;

  Lattice(std::size_t n_t, std::size_t n_z, double h_t, double h_z);

  // 16 x 16 with h = 1/16; the spacing is a power of two so derivative
  // scalings are exact in floating point.
  static Lattice reference() { return Lattice(16, 16, 1.0 / 16.0, 1.0 / 16.0); }

  std::size_t sites() const { return n_t * n_z; }
  std::size_t site(std::size_t it, std::size_t iz) const { return it * n_z + iz; }
  double volume_element() const { return h_t * h_z; }
  double extent_t() const { return static_cast<double>(n_t) * h_t; }
  double extent_z() const { return static_cast<double>(n_z) * h_z; }
  double spacing(int mu) const { return mu == 0 ? h_t : h_z; }

  bool operator==(const Lattice&) const = default;
};

// Complex field with one value per lattice site, indexed site = it*n_z + iz.
class ScalarField {
 public:
  explicit ScalarField(const Lattice& lattice);
  const Lattice& lattice() const { return lattice_; }
  Complex& operator[](std::size_t s) { return values_[s]; }
  const Complex& operator[](std::size_t s) const { return values_[s]; }
  std::size_t size() const { return values_.size(); }
  double max_abs() const;

 private:
  Lattice lattice_;
  std::vector<Complex> values_;
};

// Dense two-point kernel K(x, x'), stored row-major over (site, site').
class Kernel {
 public:
  explicit Kernel(const Lattice& lattice);

  // Scaled Kronecker delta, the identity of kernel composition.
  static Kernel identity(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  std::size_t dim() const { return dim_; }
  Complex& at(std::size_t s, std::size_t sp) { return values_[s * dim_ + sp]; }
  const Complex& at(std::size_t s, std::size_t sp) const { return values_[s * dim_ + sp]; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }
  double max_abs() const;

 private:
  Lattice lattice_;
  std::size_t dim_;
  std::vector<Complex> values_;
};

Kernel add(const Kernel& a, const Kernel& b);
Kernel subtract(const Kernel& a, const Kernel& b);

// Two-component non-local potential A_mu(x, x'), mu in {0 (t), 1 (z)}.
struct PotentialKernel {
  Kernel component0;
  Kernel component1;

  PotentialKernel(Kernel c0, Kernel c1);
  const Kernel& component(int mu) const;
};

// Antisymmetric field tensor; only the (0,1) component is stored, the rest
// follow from F^{mu nu} = -F^{nu mu} with zero diagonal.
class FieldTensor {
 public:
  explicit FieldTensor(Kernel f01) : f01_(std::move(f01)) {}
  const Kernel& component01() const { return f01_; }
  Kernel component(int mu, int nu) const;

 private:
  Kernel f01_;
};

// Standard derivatives, or an x'-derivative deliberately scaled by a
// site-dependent factor s(x) on the first slot.
class CommutationControl {
 public:
  static CommutationControl standard();
  // s(x) = 1 + amplitude * sin(2 pi t / L_t).
  static CommutationControl broken_sinusoidal(const Lattice& lattice, double amplitude = 0.5);
  static CommutationControl broken(const Lattice& lattice, std::vector<double> factor_by_site);

  bool is_broken() const { return broken_; }
  const std::vector<double>& factors() const { return factors_; }

 private:
  bool broken_ = false;
  std::vector<double> factors_;
};

// (P phi)(x) = sum_{x'} P(x, x') phi(x') h_t h_z.
ScalarField apply_kernel(const Kernel& kernel, const ScalarField& phi);

// (P Q)(x, x'') = sum_{x'} P(x, x') Q(x', x'') h_t h_z.
Kernel compose_kernels(const Kernel& p, const Kernel& q);

// Periodic central difference on the first slot (x) in direction mu.
Kernel derivative_x(const Kernel& kernel, int mu);

// Periodic central difference on the second slot (x'); the broken control
// multiplies the result by s(x).
Kernel derivative_xprime(const Kernel& kernel, int mu,
                         const CommutationControl& control = CommutationControl::standard());

// Periodic central difference of a site field.
ScalarField derivative_field(const ScalarField& phi, int mu);

// || d_x^mu d_x'^nu K - d_x'^nu d_x^mu K ||_inf / ||K||_inf. Throws
// std::domain_error on a zero kernel.
double commutator_residual(const Kernel& kernel, int mu, int nu,
                           const CommutationControl& control = CommutationControl::standard());

// A'_mu = A_mu + d_x Lambda + d_x' Lambda (x'-derivative per control).
PotentialKernel transform_potential(const PotentialKernel& a, const Kernel& lambda,
                                    const CommutationControl& control = CommutationControl::standard());

// F^{01} = (d_x^0 + d_x'^0) A^1 - (d_x^1 + d_x'^1) A^0, Euclidean indices.
FieldTensor field_tensor(const PotentialKernel& a,
                         const CommutationControl& control = CommutationControl::standard());

// || F(A') - F(A) ||_inf / max(||F(A)||_inf, floor) with A' the transform of
// A by lambda; the control is applied inside both the transformation and the
// tensor so the broken case violates invariance.
double gauge_invariance_residual(const PotentialKernel& a, const Kernel& lambda,
                                 const CommutationControl& control = CommutationControl::standard());

// D_mu phi = d_mu phi + i e (A_mu phi) for a local (site) field phi.
ScalarField covariant_derivative(const ScalarField& phi, const PotentialKernel& a, int mu,
                                 double coupling);

// First-order covariance defect of D_mu under the infinitesimal non-local
// gauge transformation delta phi = -i e (Lambda phi): returns
// max_mu || D'_mu phi' - (D_mu phi + delta(D_mu phi)) ||_inf, which scales
// as O(e^2).
double covariance_residual(const ScalarField& phi, const PotentialKernel& a, const Kernel& lambda,
                           double coupling);

// Seeded band-limited random inputs: sums of lattice Fourier modes with
// |k| <= max_mode per direction and Gaussian coefficients.
ScalarField random_smooth_field(const Lattice& lattice, std::uint64_t seed, int n_modes = 8,
                                int max_mode = 2);
Kernel random_smooth_kernel(const Lattice& lattice, std::uint64_t seed, int n_modes = 12,
                            int max_mode = 2);

// Aggregate invariance / necessity / covariance suite over seeded trials.
struct GaugeCheckConfig {
  Lattice lattice = Lattice::reference();
  std::uint64_t seed = 1;
  int trials = 100;
  double broken_amplitude = 0.5;
  std::vector<double> couplings = {1e-2, 5e-3, 2.5e-3};
};

struct GaugeCheckReport {
  GaugeCheckConfig config;
  double max_standard_commutator = 0.0;  // max over trials and index pairs
  double min_broken_commutator = 0.0;    // min over trials of max over pairs
  double max_standard_invariance = 0.0;  // max over trials
  double min_broken_invariance = 0.0;    // min over trials
  std::vector<double> covariance_residuals;  // one per coupling
  double covariance_slope = 0.0;             // log-log slope vs coupling
  bool pass_standard = false;    // both standard residual maxima <= 1e-12
  bool pass_broken = false;      // both broken residual minima >= 1e-3
  bool pass_covariance = false;  // slope within 2.0 +- 0.1
};

GaugeCheckReport run_gauge_checks(const GaugeCheckConfig& config = {});

}  // namespace cmblab::nonlocal
