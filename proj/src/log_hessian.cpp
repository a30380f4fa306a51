#include "cmat/log_hessian.hpp"

#include <algorithm>
#include <cmath>

#include "cmat/error.hpp"
#include "cmat/spectral.hpp"

namespace cmat {
namespace {

// Largest |mu| with det(a - mu b) = 0, b positive definite.
double relative_operator_norm(const HermitianMatrix& a, const HermitianMatrix& b, int n) {
  if (n == 1) return std::abs(a.a11 / b.a11);
  const double qa = determinant(b, n);
  const double qb = -2.0 * mixed_determinant(a, b, n);
  const double qc = determinant(a, n);
  const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
  const double r1 = (-qb + disc) / (2.0 * qa);
  const double r2 = (-qb - disc) / (2.0 * qa);
  return std::max(std::abs(r1), std::abs(r2));
}

}  // namespace

HermitianSection HermitianSection::flat(std::vector<ComplexField> components) {
  if (components.empty()) throw Error(ErrorCode::InvalidArgument, "section needs a component");
  const TorusGrid grid = components.front().grid();
  std::vector<std::vector<ComplexField>> derivatives;
  for (const auto& c : components) {
    require_same_grid(grid, c.grid());
    derivatives.push_back(spectral_d(c));
  }
  std::vector<ComplexField> dw(grid.complex_dim(), ComplexField(grid));
  return HermitianSection{std::move(components), std::move(derivatives), ScalarField(grid),
                          std::move(dw), HermitianFormField(grid)};
}

LogHessianResult regularized_log_hessian(const HermitianSection& s, double eps,
                                         const HermitianFormField& omega) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "regularization eps must be > 0");
  if (s.components.empty()) throw Error(ErrorCode::InvalidArgument, "section needs a component");
  const TorusGrid& grid = s.components.front().grid();
  require_same_grid(grid, omega.grid());
  require_same_grid(grid, s.curvature.grid());
  const int n = grid.complex_dim();
  const std::size_t rank = s.components.size();

  bool nonzero = false;
  for (const auto& c : s.components)
    for (Complex v : c.values())
      if (v != Complex{}) nonzero = true;
  if (!nonzero)
    throw Error(ErrorCode::IdenticallyZeroSection, "section is identically zero");

  LogHessianResult r{HermitianFormField(grid), HermitianFormField(grid), HermitianFormField(grid),
                     ScalarField(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = std::exp(-s.weight[i]);
    double u = 0.0;
    std::array<Complex, 2> a{};  // {D s, s}_j
    HermitianMatrix q;           // {D s, D s}
    for (std::size_t c = 0; c < rank; ++c) {
      const Complex sc = s.components[c][i];
      std::array<Complex, 2> d{};
      for (int j = 0; j < n; ++j)
        d[j] = s.derivatives[c][j][i] - sc * s.weight_derivative[j][i];
      u += h * std::norm(sc);
      for (int j = 0; j < n; ++j) a[j] += h * d[j] * std::conj(sc);
      HermitianMatrix dd = outer(d);
      dd *= h;
      q += dd;
    }
    const double ue = u + eps;
    HermitianMatrix aa = outer(a);
    HermitianMatrix torsion = (1.0 / (ue * ue)) * (ue * q - aa);
    const HermitianMatrix& theta = s.curvature[i];
    HermitianMatrix hess = torsion - (u / ue) * theta;
    HermitianMatrix grad_term = u > 1e-300 ? (eps / (u * ue * ue)) * aa : HermitianMatrix{};
    const double cnorm = relative_operator_norm(theta, omega[i], n);
    HermitianMatrix bound = grad_term - (cnorm * u / ue) * omega[i];
    if (n == 1) {
      for (HermitianMatrix* m : {&torsion, &hess, &grad_term, &bound}) {
        m->a22 = 0.0;
        m->a12 = {};
      }
    }
    r.hessian[i] = hess;
    r.torsion[i] = torsion;
    r.gradient_term[i] = grad_term;
    r.lower_bound_margin[i] = min_eigenvalue(hess - bound, n);
  }
  return r;
}

}  // namespace cmat
