#pragma once

#include <optional>
#include <vector>

#include "cmat/field.hpp"

namespace cmat {

enum class LinearSolver {
  // Restarted GMRES on the exact Jacobian tr(g^{-1} i ddbar v) - lambda v,
  // right-preconditioned by its constant-coefficient symbol.
  Gmres,
  // Conjugate gradients on the symmetric divergence form of the same operator
  // (weighted by det g), preconditioned by a flat spectral symbol.
  ConjugateGradient,
};

struct SolveOptions {
  int max_newton_iters = 60;
  double residual_tol = 1e-10;
  int max_halvings = 40;
  bool rescale_mass = true;
  LinearSolver linear_solver = LinearSolver::Gmres;
  int krylov_restart = 20;
  int max_krylov_iters = 600;
  std::optional<ScalarField> initial;  // must lie in the cone
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // sup-norm, one entry per evaluated iterate
  std::vector<double> mass_history;      // integral of det(omega + i ddbar phi)
  std::vector<int> krylov_iterations;
  double oscillation = 0.0;
  double min_cone_eigenvalue = 0.0;      // smallest eigenvalue met along the accepted path
  double normalizing_constant = 1.0;     // factor applied to f
  double wall_seconds = 0.0;
  double lambda = 0.0;
};

struct SolveResult {
  ScalarField phi;
  SolveReport report;
};

// Solves det(omega + i ddbar phi) = kappa f e^{lambda phi} omega_weight by damped
// Newton iteration. omega_weight is the volume density against the unit
// Lebesgue measure (nullptr means det omega, the volume form omega^n). For
// lambda = 0 kappa matches the masses and the returned phi has sup 0; a
// residual mass defect from the discretization is absorbed into kappa.
SolveResult solve_ma(const HermitianFormField& omega, const ScalarField& f, double lambda,
                     const ScalarField* omega_weight = nullptr, const SolveOptions& opts = {});

// Sup-norm of log det(omega + i ddbar phi) - log(kappa f omega_weight) - lambda phi.
double equation_residual(const HermitianFormField& omega, const ScalarField& phi,
                         const ScalarField& f, double lambda, double kappa,
                         const ScalarField* omega_weight = nullptr);

struct YauOptions {
  SolveOptions solve;
  int max_iterations = 200;
  double chain_tol = 1e-8;       // tolerance of the sandwich inequalities
  double stop_gap = 1e-9;        // stop once sup(upper - lower) falls below
  bool monitor_laplacian = false;
};

struct YauResult {
  std::vector<ScalarField> upper;  // phi'_j, j = 0..J
  std::vector<ScalarField> lower;  // phi''_j
  ScalarField limit;               // (phi'_J + phi''_J) / 2
  double max_violation = 0.0;      // worst excess over all inequalities and iterates
  std::vector<double> gaps;        // sup(phi'_j - phi''_j)
  std::vector<double> laplacian_sup;  // max of 2 tr_omega(omega + i ddbar phi'_j) when monitored
  double fitted_c2 = 0.0;             // smallest C with 2 B_j <= B_{j-1} + C on all steps
};

struct YauStart {
  ScalarField h;      // shifted so that the mass condition holds exactly
  ScalarField upper;  // solution with min 0
  ScalarField lower;  // solution with max 0
};

// Starting pair: solves (omega + i ddbar psi)^n = e^h omega^n after shifting h
// by the mass-matching constant.
YauStart yau_initial_pair(const HermitianFormField& omega, const ScalarField& h,
                          const SolveOptions& opts = {});

// Monotone iteration (omega + i ddbar phi_j)^n = e^{h + (lambda+1) phi_j - phi_{j-1}} omega^n
// run from both starting potentials.
YauResult yau_iteration(const HermitianFormField& omega, const ScalarField& h, double lambda,
                        const ScalarField& upper0, const ScalarField& lower0,
                        const YauOptions& opts = {});

// Max pairwise sup-distance between solutions started from each initial guess.
double uniqueness_probe(const HermitianFormField& omega, const ScalarField& f, double lambda,
                        const std::vector<ScalarField>& inits, const SolveOptions& opts = {});

struct StabilityRow {
  double l1_dist;
  double linf_dist;
  double bound;  // 2 C^{a0} (log 1/l1)^{-a0}, NaN before a constant is fitted
};

// Rate exponent 1/(n + 1 + n^2/eps0).
double stability_exponent(int n, double eps0);

// Solves lambda = 0 for f and g with sup normalization and compares.
StabilityRow stability_probe(const HermitianFormField& omega, const ScalarField& f,
                             const ScalarField& g, double eps0, std::optional<double> constant,
                             const SolveOptions& opts = {});

struct StabilityLadder {
  std::vector<StabilityRow> rows;
  double fitted_constant;
};

// Runs the probe along perturbations g_k (coarsest first), fits the smallest
// constant making the bound hold on the first rung and evaluates the rest.
StabilityLadder stability_ladder(const HermitianFormField& omega, const ScalarField& f,
                                 const std::vector<ScalarField>& perturbed, double eps0,
                                 const SolveOptions& opts = {});

}  // namespace cmat
