#pragma once

#include <optional>
#include <vector>

#include "cmat/field.hpp"
#include "cmat/solver.hpp"

namespace cmat {

// |s|^2 is the sum of |c|^2 over the components, so a vector-valued section
// with isolated common zeros is allowed.
struct DensityFactor {
  std::vector<ComplexField> components;
  double exponent = 1.0;
};

// G_eps = scale * prod (|sigma_j|^2 + eps^A)^{l_j} * prod (|tau_r|^2 + eps)^{-h_r}.
struct Density {
  std::vector<DensityFactor> zeros;  // sigma_j with l_j
  std::vector<DensityFactor> poles;  // tau_r with h_r
  double eps = 0.0;
  std::optional<double> a;           // defaults to default_a()
  double scale = 1.0;

  // (sum h_r) / (min l_j); 1 when there are no poles, since A = 0 would
  // freeze the zero factors at |sigma|^2 + 1.
  double default_a() const;
  double effective_a() const { return a ? *a : default_a(); }
  Density with_eps(double e) const;
};

// Components (e^{2 pi i (x - a)} - 1)/2 along each real axis of the chosen
// complex directions, vanishing exactly at `center` in those directions:
// all directions give an isolated point, one direction a complex curve.
DensityFactor point_zero(const TorusGrid& grid, const Point& center, double exponent);
DensityFactor curve_zero(const TorusGrid& grid, int direction, double a, double b, double exponent);
// Center of the grid cell whose lower corner is grid point `index`, so that
// zeros sit between samples.
Point cell_center(const TorusGrid& grid, std::size_t index);

// Squared modulus sum(|c|^2). Pole factors are evaluated with a floor of 1e-300.
ScalarField squared_norm(const DensityFactor& factor);
ScalarField build_density(const TorusGrid& grid, const Density& spec);

// c_eps = log(integral (omega + eps alpha)^n / integral G_eps Omega).
double normalize_c_eps(const Density& spec, const HermitianFormField& omega, const HermitianFormField& alpha,
                       double eps, const ScalarField& volume);
// Sets spec.scale so that the eps = 0 density has the class mass of omega.
void match_mass(Density& spec, const HermitianFormField& omega, const ScalarField& volume);

// Geometric schedule from `start` down to `floor` with ratio 1/sqrt(10).
std::vector<double> default_eps_schedule(double start = 1e-1, double floor = 1e-5);

struct PathRow {
  double eps_or_t;
  double c_eps_or_k;      // c_eps, or K_t in the Tian scenario
  double oscillation;
  double sup_laplacian;   // max of 2 tr(form + i ddbar phi) against the flat metric
  double residual;
  double warm_dist;       // sup distance to the previous step, NaN on the first
};

struct ContinuationResult {
  ScalarField phi;  // solution at the schedule floor
  std::vector<PathRow> rows;
};

// Solves (omega + eps alpha + i ddbar phi)^n = e^{c_eps} G_eps e^{lambda phi} Omega along
// the schedule, each step warm-started from the previous one.
ContinuationResult continuation_path(const HermitianFormField& omega, const HermitianFormField& alpha,
                                     const Density& spec, double lambda, const std::vector<double>& schedule,
                                     const ScalarField& volume, const SolveOptions& opts = {});

struct LpCheck {
  double a;
  std::vector<double> distances;   // ||G_eps - G_0||_p along the schedule
  bool decreasing;
  double coarse_integral;          // integral of G_0^p on the every-other-point subgrid
  double fine_integral;
  std::vector<double> witness;     // same with A = A_0/4; empty without poles
  bool witness_decreasing;
};

// Refinement test first: the integral of G_0^p on the subsampled grid must
// agree with the full grid within 1%, otherwise NonIntegrable.
LpCheck lp_convergence_check(const TorusGrid& grid, const Density& spec, double p,
                             const std::vector<double>& schedule);

// Product X = E_1 x E_2 with projection to the first factor. Solves
// (base pi^* omega_Y + t omega_X + i ddbar psi)^2 = K_t f omega_X^2 for each t,
// warm-started, with K_t the class mass; rows carry K_t in c_eps_or_k.
ContinuationResult tian_family_run(double base_coefficient, const HermitianFormField& omega_x,
                                   const ScalarField& f, const std::vector<double>& t_schedule,
                                   const SolveOptions& opts = {});

}  // namespace cmat
