#pragma once

#include <memory>
#include <vector>

#include "cmat/field.hpp"

namespace cmat {

// A potential phi together with its class form base + i ddbar(phi), which must
// be semipositive up to kConeTolerance.
class PotentialInClass {
 public:
  PotentialInClass(std::shared_ptr<const HermitianFormField> base, ScalarField potential);
  PotentialInClass(const HermitianFormField& base, ScalarField potential);

  const HermitianFormField& base() const noexcept { return *base_; }
  const std::shared_ptr<const HermitianFormField>& shared_base() const noexcept { return base_; }
  const ScalarField& potential() const noexcept { return potential_; }
  const HermitianFormField& form() const noexcept { return form_; }
  // sup phi = 0 up to 1e-12.
  bool normalized() const noexcept { return normalized_; }
  // Same class with phi replaced by phi - sup phi.
  PotentialInClass normalized_copy() const;

 private:
  std::shared_ptr<const HermitianFormField> base_;
  ScalarField potential_;
  HermitianFormField form_;
  bool normalized_;
};

bool same_base(const PotentialInClass& a, const PotentialInClass& b);

struct MixedEntry {
  const HermitianFormField* form;
  int power;
};

// Density of the wedge product of the entries (powers summing to n) against
// ref^n. The n = 2 mixed term uses the polarized determinant, symmetric in its
// arguments bit for bit.
ScalarField mixed_ma_measure(const std::vector<MixedEntry>& entries, const HermitianFormField& ref);

struct ComparisonResult {
  double lhs;     // integral over {phi < psi} of (gamma_psi)^n
  double rhs;     // integral over {phi < psi} of (gamma_phi)^n
  double margin;  // rhs - lhs
};
ComparisonResult comparison_check(const PotentialInClass& phi, const PotentialInClass& psi);

struct ConeCheck {
  bool ok;
  double min_eig;
};
ConeCheck cone_check(const HermitianFormField& form);

struct MonotoneProbeOptions {
  int k = 1;                              // power of the smoothed class form
  int l = 0;                              // power of the closed positive form T
  const HermitianFormField* t = nullptr;  // required when l > 0
  const HermitianFormField* filler = nullptr;  // fills remaining degrees; defaults to omega
  const ScalarField* test_function = nullptr;  // multiplies the integrand; defaults to 1
  const HermitianFormField* omega = nullptr;   // Kahler form in gamma_phi + eps omega; defaults to identity
};

struct MonotoneProbeRow {
  double eps;
  double constant;          // additive constant making the family decrease
  double pairing;           // integral of chi phi_eps (gamma_eps)^k T^l filler^rest
  double gap;               // |pairing - unsmoothed pairing|
  double measure_pairing;   // integral of chi (gamma_eps)^{k+1} T^l filler^rest
  double measure_gap;
};

// Gaussian smoothing family phi_eps = phi * rho_eps + c(eps), with constants
// chosen so that phi_eps decreases pointwise as eps decreases and stays >= phi.
std::vector<MonotoneProbeRow> monotone_convergence_probe(const PotentialInClass& phi,
                                                         const std::vector<double>& schedule,
                                                         const MonotoneProbeOptions& opts = {});

}  // namespace cmat
