#include "cmat/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmat/error.hpp"

namespace cmat {

TorusGrid::TorusGrid(int complex_dim, int resolution) : n_(complex_dim), res_(resolution) {
  if (complex_dim != 1 && complex_dim != 2)
    throw Error(ErrorCode::InvalidArgument,
                "complex dimension must be 1 or 2, got " + std::to_string(complex_dim));
  if (resolution < 8 || (resolution & (resolution - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument,
                "resolution must be a power of two >= 8, got " + std::to_string(resolution));
  size_ = 1;
  for (int a = 0; a < 2 * n_; ++a) size_ *= static_cast<std::size_t>(res_);
}

std::array<int, 4> TorusGrid::multi_index(std::size_t index) const noexcept {
  std::array<int, 4> m{0, 0, 0, 0};
  for (int a = 2 * n_ - 1; a >= 0; --a) {
    m[a] = static_cast<int>(index % res_);
    index /= res_;
  }
  return m;
}

Point TorusGrid::point(std::size_t index) const noexcept {
  auto m = multi_index(index);
  Point p{0, 0, 0, 0};
  for (int a = 0; a < 2 * n_; ++a) p[a] = m[a] * spacing();
  return p;
}

std::size_t TorusGrid::index(const std::array<int, 4>& multi) const noexcept {
  std::size_t idx = 0;
  for (int a = 0; a < 2 * n_; ++a) {
    int v = multi[a] % res_;
    if (v < 0) v += res_;
    idx = idx * res_ + static_cast<std::size_t>(v);
  }
  return idx;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b))
    throw Error(ErrorCode::GridMismatch,
                "grid mismatch: (n=" + std::to_string(a.complex_dim()) + ", N=" +
                    std::to_string(a.resolution()) + ") vs (n=" +
                    std::to_string(b.complex_dim()) + ", N=" + std::to_string(b.resolution()) + ")");
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const TorusGrid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::GridMismatch, "sample count " + std::to_string(values_.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid_.size()));
}

ScalarField ScalarField::from_function(const TorusGrid& grid,
                                       const std::function<double(const Point&)>& fn) {
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = fn(grid.point(i));
  return f;
}

void ScalarField::require_finite(const std::string& what) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw Error(ErrorCode::NonFinite,
                  what + ": non-finite sample at index " + std::to_string(i));
}

double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::mean() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator+=(double c) noexcept {
  for (double& v : values_) v += c;
  return *this;
}
ScalarField& ScalarField::operator-=(double c) noexcept {
  for (double& v : values_) v -= c;
  return *this;
}
ScalarField& ScalarField::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
  return out;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator+(ScalarField a, double c) { return a += c; }
ScalarField operator-(ScalarField a, double c) { return a -= c; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }
ScalarField operator*(ScalarField a, double c) { return a *= c; }

// --------------------------------------------------------------- ComplexField

ComplexField::ComplexField(const TorusGrid& grid, Complex value)
    : grid_(grid), values_(grid.size(), value) {}

ComplexField::ComplexField(const TorusGrid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::GridMismatch, "sample count " + std::to_string(values_.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid_.size()));
}

ComplexField ComplexField::from_function(const TorusGrid& grid,
                                         const std::function<Complex(const Point&)>& fn) {
  ComplexField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = fn(grid.point(i));
  return f;
}

void ComplexField::require_finite(const std::string& what) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
      throw Error(ErrorCode::NonFinite,
                  what + ": non-finite sample at index " + std::to_string(i));
}

ScalarField ComplexField::real() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}
ScalarField ComplexField::imag() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].imag();
  return out;
}
ScalarField ComplexField::abs2() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::norm(values_[i]);
  return out;
}

// ------------------------------------------------------------ HermitianMatrix

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) noexcept {
  a11 += o.a11;
  a22 += o.a22;
  a12 += o.a12;
  return *this;
}
HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) noexcept {
  a11 -= o.a11;
  a22 -= o.a22;
  a12 -= o.a12;
  return *this;
}
HermitianMatrix& HermitianMatrix::operator*=(double c) noexcept {
  a11 *= c;
  a22 *= c;
  a12 *= c;
  return *this;
}
HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) noexcept { return a += b; }
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) noexcept { return a -= b; }
HermitianMatrix operator*(double c, HermitianMatrix a) noexcept { return a *= c; }

double determinant(const HermitianMatrix& m, int n) noexcept {
  if (n == 1) return m.a11;
  return m.a11 * m.a22 - std::norm(m.a12);
}

double trace(const HermitianMatrix& m, int n) noexcept {
  return n == 1 ? m.a11 : m.a11 + m.a22;
}

double min_eigenvalue(const HermitianMatrix& m, int n) noexcept {
  if (n == 1) return m.a11;
  const double half_sum = 0.5 * (m.a11 + m.a22);
  const double half_diff = 0.5 * (m.a11 - m.a22);
  return half_sum - std::sqrt(half_diff * half_diff + std::norm(m.a12));
}

double max_eigenvalue(const HermitianMatrix& m, int n) noexcept {
  if (n == 1) return m.a11;
  const double half_sum = 0.5 * (m.a11 + m.a22);
  const double half_diff = 0.5 * (m.a11 - m.a22);
  return half_sum + std::sqrt(half_diff * half_diff + std::norm(m.a12));
}

HermitianMatrix adjugate(const HermitianMatrix& m, int n) noexcept {
  if (n == 1) return {1.0, 0.0, {}};
  return {m.a22, m.a11, -m.a12};
}

HermitianMatrix inverse(const HermitianMatrix& m, int n) noexcept {
  if (n == 1) return {1.0 / m.a11, 0.0, {}};
  HermitianMatrix adj = adjugate(m, n);
  adj *= 1.0 / determinant(m, n);
  return adj;
}

double mixed_determinant(const HermitianMatrix& a, const HermitianMatrix& b, int n) noexcept {
  if (n == 1) return 0.5 * (a.a11 + b.a11);
  return 0.5 * (a.a11 * b.a22 + a.a22 * b.a11) -
         (a.a12.real() * b.a12.real() + a.a12.imag() * b.a12.imag());
}

double quadratic_form(const HermitianMatrix& m, const std::array<Complex, 2>& u, int n) noexcept {
  if (n == 1) return m.a11 * std::norm(u[0]);
  return m.a11 * std::norm(u[0]) + m.a22 * std::norm(u[1]) +
         2.0 * std::real(std::conj(u[0]) * m.a12 * u[1]);
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b, int n) noexcept {
  if (n == 1) return a.a11 * b.a11;
  return a.a11 * b.a11 + a.a22 * b.a22 + 2.0 * std::real(a.a12 * std::conj(b.a12));
}

HermitianMatrix outer(const std::array<Complex, 2>& u) noexcept {
  return {std::norm(u[0]), std::norm(u[1]), u[0] * std::conj(u[1])};
}

// --------------------------------------------------------- HermitianFormField

HermitianFormField::HermitianFormField(const TorusGrid& grid, HermitianMatrix value)
    : grid_(grid), m_(grid.size(), value) {
  if (grid.complex_dim() == 1) {
    for (auto& m : m_) {
      m.a22 = 0.0;
      m.a12 = {};
    }
  }
}

HermitianFormField::HermitianFormField(const TorusGrid& grid, std::vector<HermitianMatrix> matrices)
    : grid_(grid), m_(std::move(matrices)) {
  if (m_.size() != grid_.size())
    throw Error(ErrorCode::GridMismatch, "matrix count " + std::to_string(m_.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid_.size()));
}

void HermitianFormField::mark_semipositive() {
  const double lo = min_eigenvalue_overall();
  if (!(lo >= -kConeTolerance))
    throw Error(ErrorCode::InvalidArgument,
                "form is not semipositive: min eigenvalue " + std::to_string(lo));
  semipositive_ = true;
}

ScalarField HermitianFormField::determinant() const {
  ScalarField out(grid_);
  const int n = dim();
  for (std::size_t i = 0; i < m_.size(); ++i) out[i] = cmat::determinant(m_[i], n);
  return out;
}

ScalarField HermitianFormField::trace() const {
  ScalarField out(grid_);
  const int n = dim();
  for (std::size_t i = 0; i < m_.size(); ++i) out[i] = cmat::trace(m_[i], n);
  return out;
}

ScalarField HermitianFormField::min_eigenvalue() const {
  ScalarField out(grid_);
  const int n = dim();
  for (std::size_t i = 0; i < m_.size(); ++i) out[i] = cmat::min_eigenvalue(m_[i], n);
  return out;
}

double HermitianFormField::min_eigenvalue_overall() const noexcept {
  const int n = dim();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : m_) lo = std::min(lo, cmat::min_eigenvalue(m, n));
  return lo;
}

HermitianMatrix HermitianFormField::mean() const noexcept {
  HermitianMatrix s;
  for (const auto& m : m_) s += m;
  s *= 1.0 / static_cast<double>(m_.size());
  return s;
}

HermitianFormField& HermitianFormField::operator+=(const HermitianFormField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
  semipositive_ = semipositive_ && o.semipositive_;
  return *this;
}
HermitianFormField& HermitianFormField::operator-=(const HermitianFormField& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < m_.size(); ++i) m_[i] -= o.m_[i];
  semipositive_ = false;
  return *this;
}
HermitianFormField& HermitianFormField::operator*=(double c) noexcept {
  for (auto& m : m_) m *= c;
  if (c < 0) semipositive_ = false;
  return *this;
}

HermitianFormField operator+(HermitianFormField a, const HermitianFormField& b) { return a += b; }
HermitianFormField operator-(HermitianFormField a, const HermitianFormField& b) { return a -= b; }
HermitianFormField operator*(double c, HermitianFormField a) { return a *= c; }

// ------------------------------------------------------------------ quadrature

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().weight();
}

double integrate(const ScalarField& f, const ScalarField& weight) {
  require_same_grid(f.grid(), weight.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * weight[i];
  return s * f.grid().weight();
}

double oscillation(const ScalarField& f) noexcept { return f.max() - f.min(); }

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d * a.grid().weight();
}

ScalarField ma_density(const HermitianFormField& g, const HermitianFormField& reference) {
  require_same_grid(g.grid(), reference.grid());
  const int n = g.dim();
  ScalarField out(g.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dr = determinant(reference[i], n);
    if (!(dr > 0.0) || !(min_eigenvalue(reference[i], n) > 0.0))
      throw Error(ErrorCode::SingularReference,
                  "reference form is not positive definite at index " + std::to_string(i));
    out[i] = std::max(0.0, determinant(g[i], n)) / dr;
  }
  return out;
}

double class_mass(const HermitianFormField& g) { return integrate(g.determinant()); }

}  // namespace cmat
