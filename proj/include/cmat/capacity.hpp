#pragma once

#include <functional>
#include <random>
#include <vector>

#include "cmat/field.hpp"
#include "cmat/ma_core.hpp"
#include "cmat/random.hpp"

namespace cmat {

// Sets are masks: ScalarFields with entries 0 or 1.
using Mask = ScalarField;

// Member of P_gamma[0,1] carried with its class form gamma + i ddbar phi, which
// may come from spectral or stencil differentiation.
struct TestPotential {
  ScalarField potential;
  HermitianFormField form;
  ScalarField density;  // det(form), clamped at 0
  double mass;          // integral of density
};

struct ExtremalResult;

class TestFamily {
 public:
  explicit TestFamily(HermitianFormField gamma);

  const HermitianFormField& gamma() const noexcept { return gamma_; }
  const std::vector<TestPotential>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  // Range 0 <= phi <= 1 is checked to 1e-12; the class form must be semipositive.
  void add(const PotentialInClass& p);
  void add(ScalarField potential, HermitianFormField form);
  // Adds psi_K / max(A_K, 1) with its stencil form.
  void add(const ExtremalResult& envelope);

 private:
  HermitianFormField gamma_;
  std::vector<TestPotential> members_;
};

// Zero potential plus `count` random band-limited cone potentials rescaled
// into [0, 1].
TestFamily bundled_family(const HermitianFormField& gamma, const SeedSequence& seeds, int count = 24);

// max over the family of the share of each member's Monge-Ampere mass lying in E.
double capacity_estimate(const HermitianFormField& gamma, const Mask& e, const TestFamily& family);

struct CapacityProfile {
  std::vector<double> s;  // increasing, negative
  std::vector<double> a;  // Cap({psi < s})^{1/n}
  double decay_constant = 0.0;  // n + integral(-psi gamma^n) / {gamma}^n
  bool decay_ok = true;         // a(s) <= (C / -s)^{1/n} at every sample

  // Right-continuous step interpolation; 0 left of the first sample.
  double operator()(double x) const;
};

CapacityProfile sublevel_profile(const HermitianFormField& gamma, const PotentialInClass& psi,
                                 const std::vector<double>& s_grid, const TestFamily& family);

struct KolodziejVerdict {
  bool applicable;  // a(S) > 0
  double lhs;       // D
  double rhs;       // e (3 + 2/delta) B a(S + D)^delta
  double margin;    // rhs - lhs
};

// Values of `a` on the lattice s_i = -1 + i/(m-1), read as a right-continuous
// step function on [-1, 0]. The hypothesis t a(s) <= B a(s+t)^{1+delta} is
// checked cell-conservatively (t rounded up to the next lattice step), which
// covers every (s, t) in the continuum for such step functions.
KolodziejVerdict kolodziej_bound(const std::vector<double>& lattice_values, double b, double delta, double s,
                                 double d);
KolodziejVerdict kolodziej_bound(const std::function<double(double)>& a, double b, double delta, double s,
                                 double d, int lattice = 200);
KolodziejVerdict kolodziej_bound(const CapacityProfile& a, double b, double delta, double s, double d,
                                 int lattice = 200);

// Random non-decreasing step profile on the lattice: up to six jumps at
// uniform positions to uniform levels in [0, 1].
std::vector<double> random_step_profile(std::mt19937_64& rng, int lattice = 200);

struct IntegralBounds {
  double alpha;
  double c;
};

// Largest alpha in {2^-k, k = 0..12} whose exponential integrals agree between
// the grid and its every-other-point subgrid within a factor 2 for all
// samples, and C = 2 max over samples of both integrals.
IntegralBounds integral_bounds_estimate(const ScalarField& volume, const std::vector<ScalarField>& samples);

struct VolumeCapacity {
  double vol;
  double cap;
  double bound;   // e^alpha C e^{-alpha / cap^{1/n}}
  double margin;  // bound - vol
};

VolumeCapacity volume_capacity_check(const HermitianFormField& gamma, const ScalarField& volume, const Mask& e,
                                     double alpha, double c, const TestFamily& family);

struct CapIntegralCheck {
  double lhs;  // integral of -psi gamma_phi^n
  double rhs;  // integral of -psi gamma^n + n integral gamma^n
  double margin;
};

CapIntegralCheck cap_integral_check(const PotentialInClass& phi, const PotentialInClass& psi);

struct ExtremalOptions {
  int max_sweeps = 400000;
  double tol = 1e-14;  // stop once a sweep raises no sample by more than this
};

struct ExtremalResult {
  ScalarField psi;           // >= 0, zero on K
  HermitianFormField form;   // gamma + stencil complex Hessian of psi
  ScalarField density;       // det(form) clamped at 0
  int sweeps;
  double sup;                // A_K
};

// Largest discrete subsolution below 0 on K: Gauss-Seidel from 0 on the
// monotone scheme psi_i <= mean over a complex line of its four neighbours
// plus h^2 gamma(xi, xi), over lines {v, Jv} with v in {-1,0,1}^{2n}
// (the 5-point stencil for n = 1).
ExtremalResult extremal_function(const HermitianFormField& gamma, const Mask& k, const ExtremalOptions& opts = {});

// Share of the discrete Monge-Ampere mass lying within one cell of K.
double mass_near(const ExtremalResult& r, const Mask& k);

}  // namespace cmat
