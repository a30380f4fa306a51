#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cmat {

using Complex = std::complex<double>;
using Point = std::array<double, 4>;

// Periodic sample grid on the flat torus C^n / (Z^n + iZ^n) with unit period
// along each real axis. Real axes are ordered x1, y1, x2, y2 (z_j = x_j + i y_j)
// and samples are stored row-major with axis 0 varying slowest.
class TorusGrid {
 public:
  TorusGrid(int complex_dim, int resolution);

  int complex_dim() const noexcept { return n_; }
  int real_dim() const noexcept { return 2 * n_; }
  int resolution() const noexcept { return res_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / res_; }
  double weight() const noexcept { return 1.0 / static_cast<double>(size_); }

  // Coordinates of a sample; unused trailing axes are zero.
  Point point(std::size_t index) const noexcept;
  std::array<int, 4> multi_index(std::size_t index) const noexcept;
  // Periodic wrap is applied to every component.
  std::size_t index(const std::array<int, 4>& multi) const noexcept;

  bool operator==(const TorusGrid& other) const noexcept {
    return n_ == other.n_ && res_ == other.res_;
  }

 private:
  int n_;
  int res_;
  std::size_t size_;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b);

class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, double value = 0.0);
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  static ScalarField from_function(const TorusGrid& grid,
                                   const std::function<double(const Point&)>& fn);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  // Throws NonFinite naming `what` when a sample is NaN or infinite.
  void require_finite(const std::string& what) const;

  double max() const noexcept;
  double min() const noexcept;
  double mean() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(const ScalarField& other);
  ScalarField& operator+=(double c) noexcept;
  ScalarField& operator-=(double c) noexcept;
  ScalarField& operator*=(double c) noexcept;

  ScalarField map(const std::function<double(double)>& fn) const;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
  std::string label_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator+(ScalarField a, double c);
ScalarField operator-(ScalarField a, double c);
ScalarField operator*(double c, ScalarField a);
ScalarField operator*(ScalarField a, double c);

class ComplexField {
 public:
  explicit ComplexField(const TorusGrid& grid, Complex value = {});
  ComplexField(const TorusGrid& grid, std::vector<Complex> values);

  static ComplexField from_function(const TorusGrid& grid,
                                    const std::function<Complex(const Point&)>& fn);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  Complex operator[](std::size_t i) const noexcept { return values_[i]; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }

  void require_finite(const std::string& what) const;
  ScalarField real() const;
  ScalarField imag() const;
  ScalarField abs2() const;

 private:
  TorusGrid grid_;
  std::vector<Complex> values_;
};

// Hermitian n x n matrix for n <= 2, stored by its independent entries so it is
// Hermitian by construction. For n = 1 only a11 is used.
struct HermitianMatrix {
  double a11 = 0.0;
  double a22 = 0.0;
  Complex a12{};  // row 1, column 2; the (2,1) entry is conj(a12)

  static HermitianMatrix identity() noexcept { return {1.0, 1.0, {}}; }
  static HermitianMatrix diagonal(double d1, double d2) noexcept { return {d1, d2, {}}; }

  HermitianMatrix& operator+=(const HermitianMatrix& o) noexcept;
  HermitianMatrix& operator-=(const HermitianMatrix& o) noexcept;
  HermitianMatrix& operator*=(double c) noexcept;
};

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) noexcept;
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) noexcept;
HermitianMatrix operator*(double c, HermitianMatrix a) noexcept;

double determinant(const HermitianMatrix& m, int n) noexcept;
double trace(const HermitianMatrix& m, int n) noexcept;
double min_eigenvalue(const HermitianMatrix& m, int n) noexcept;
double max_eigenvalue(const HermitianMatrix& m, int n) noexcept;
// adj(m) with m * adj(m) = det(m) I; for n = 1 the adjugate is 1.
HermitianMatrix adjugate(const HermitianMatrix& m, int n) noexcept;
HermitianMatrix inverse(const HermitianMatrix& m, int n) noexcept;
// Polarized determinant: D(A, A) = det A and D(A, B) = D(B, A). For n = 1 it is
// the average of the two entries.
double mixed_determinant(const HermitianMatrix& a, const HermitianMatrix& b, int n) noexcept;
// conj(u)^T M u; u[1] is ignored for n = 1.
double quadratic_form(const HermitianMatrix& m, const std::array<Complex, 2>& u, int n) noexcept;
// tr(A B) for Hermitian A, B (real).
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b, int n) noexcept;
// Rank-one matrix u u^*.
HermitianMatrix outer(const std::array<Complex, 2>& u) noexcept;

class HermitianFormField {
 public:
  explicit HermitianFormField(const TorusGrid& grid, HermitianMatrix value = {});
  HermitianFormField(const TorusGrid& grid, std::vector<HermitianMatrix> matrices);

  const TorusGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.complex_dim(); }
  std::size_t size() const noexcept { return m_.size(); }
  const HermitianMatrix& operator[](std::size_t i) const noexcept { return m_[i]; }
  HermitianMatrix& operator[](std::size_t i) noexcept { return m_[i]; }
  std::span<const HermitianMatrix> matrices() const noexcept { return m_; }

  bool semipositive() const noexcept { return semipositive_; }
  // Sets the flag after checking min eigenvalue >= -1e-10 everywhere.
  void mark_semipositive();

  ScalarField determinant() const;
  ScalarField trace() const;
  ScalarField min_eigenvalue() const;
  double min_eigenvalue_overall() const noexcept;
  HermitianMatrix mean() const noexcept;

  HermitianFormField& operator+=(const HermitianFormField& o);
  HermitianFormField& operator-=(const HermitianFormField& o);
  HermitianFormField& operator*=(double c) noexcept;

 private:
  TorusGrid grid_;
  std::vector<HermitianMatrix> m_;
  bool semipositive_ = false;
};

HermitianFormField operator+(HermitianFormField a, const HermitianFormField& b);
HermitianFormField operator-(HermitianFormField a, const HermitianFormField& b);
HermitianFormField operator*(double c, HermitianFormField a);

inline constexpr double kConeTolerance = 1e-10;

// Quadrature sum of f (times weight when given) with uniform weights 1/size.
double integrate(const ScalarField& f);
double integrate(const ScalarField& f, const ScalarField& weight);
double oscillation(const ScalarField& f) noexcept;
double sup_distance(const ScalarField& a, const ScalarField& b);
double l1_distance(const ScalarField& a, const ScalarField& b);

// Density of g^n against reference^n, pointwise det(g)/det(reference).
ScalarField ma_density(const HermitianFormField& g, const HermitianFormField& reference);
// Total mass of the class, the integral of det(g) against the unit volume.
double class_mass(const HermitianFormField& g);

}  // namespace cmat
