#pragma once

#include <vector>

#include "cmat/field.hpp"

namespace cmat {

// A section of a rank-r bundle trivialized over the torus cell, with the
// hermitian metric e^{-weight} times the identity. The Chern connection is
// D_j s = ds/dz_j - s dweight/dz_j and the curvature is i ddbar weight.
struct HermitianSection {
  std::vector<ComplexField> components;
  // derivatives[c][j] = d components[c] / dz_j
  std::vector<std::vector<ComplexField>> derivatives;
  ScalarField weight;
  std::vector<ComplexField> weight_derivative;  // d weight / dz_j
  HermitianFormField curvature;

  // Periodic components on a flat trivial bundle; derivatives are spectral.
  static HermitianSection flat(std::vector<ComplexField> components);
};

struct LogHessianResult {
  HermitianFormField hessian;        // i ddbar log(|s|^2 + eps)
  HermitianFormField torsion;        // the nonnegative part iT
  HermitianFormField gradient_term;  // eps/|s|^2 * i dS ^ dbarS with S = log(|s|^2 + eps)
  ScalarField lower_bound_margin;    // min eigenvalue of hessian minus its lower bound
};

// Closed-form complex Hessian of log(|s|^2 + eps). The margin compares the
// Hessian with eps/|s|^2 i dS ^ dbarS - |C| |s|^2/(|s|^2+eps) omega, where |C|
// is the operator norm of the curvature measured against omega.
LogHessianResult regularized_log_hessian(const HermitianSection& section, double eps,
                                         const HermitianFormField& omega);

}  // namespace cmat
