#include "cmat/degenerate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cmat/error.hpp"
#include "cmat/random.hpp"
#include "cmat/spectral.hpp"

namespace cmat {

namespace {

constexpr double kSampleFloor = 1e-300;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw Error(ErrorCode::ScheduleInvalid, "empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0) || !std::isfinite(schedule[k]))
      throw Error(ErrorCode::ScheduleInvalid, "schedule entries must be finite and > 0");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw Error(ErrorCode::ScheduleInvalid, "schedule must be strictly decreasing");
  }
}

double sup_trace(const HermitianFormField& form, const ScalarField& phi) {
  const HermitianFormField g = form + spectral_dd_bar(phi);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) best = std::max(best, 2.0 * trace(g[i], g.dim()));
  return best;
}

// Keeps a warm start inside the cone of a slightly smaller form.
ScalarField admissible_start(const HermitianFormField& form, const ScalarField& phi) {
  const HermitianFormField h = spectral_dd_bar(phi);
  const double floor = 1e-3 * form.min_eigenvalue_overall();
  const double s = max_cone_scale(form, h, floor);
  return s >= 1.0 ? phi : 0.9 * s * phi;
}

}  // namespace

double Density::default_a() const {
  if (poles.empty() || zeros.empty()) return 1.0;
  double hsum = 0.0, lmin = std::numeric_limits<double>::infinity();
  for (const auto& p : poles) hsum += p.exponent;
  for (const auto& z : zeros) lmin = std::min(lmin, z.exponent);
  if (!(lmin > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero exponents must be > 0 to derive A");
  return hsum / lmin;
}

Density Density::with_eps(double e) const {
  Density d = *this;
  d.eps = e;
  return d;
}

Point cell_center(const TorusGrid& grid, std::size_t index) {
  Point p = grid.point(index);
  for (int a = 0; a < grid.real_dim(); ++a) p[a] += 0.5 * grid.spacing();
  return p;
}

namespace {

ComplexField axis_component(const TorusGrid& grid, int axis, double center) {
  return ComplexField::from_function(grid, [axis, center](const Point& p) {
    return 0.5 * (std::exp(Complex(0.0, 2.0 * M_PI * (p[axis] - center))) - 1.0);
  });
}

}  // namespace

DensityFactor point_zero(const TorusGrid& grid, const Point& center, double exponent) {
  DensityFactor f{{}, exponent};
  for (int a = 0; a < grid.real_dim(); ++a) f.components.push_back(axis_component(grid, a, center[a]));
  return f;
}

DensityFactor curve_zero(const TorusGrid& grid, int direction, double a, double b, double exponent) {
  if (direction < 0 || direction >= grid.complex_dim())
    throw Error(ErrorCode::InvalidArgument, "curve direction out of range");
  return {{axis_component(grid, 2 * direction, a), axis_component(grid, 2 * direction + 1, b)}, exponent};
}

ScalarField squared_norm(const DensityFactor& factor) {
  if (factor.components.empty())
    throw Error(ErrorCode::IdenticallyZeroSection, "section has no components");
  ScalarField s(factor.components.front().grid());
  for (const auto& c : factor.components) {
    require_same_grid(s.grid(), c.grid());
    c.require_finite("section");
    s += c.abs2();
  }
  if (s.max() == 0.0) throw Error(ErrorCode::IdenticallyZeroSection, "section vanishes identically");
  return s;
}

ScalarField build_density(const TorusGrid& grid, const Density& spec) {
  if (!(spec.eps >= 0.0) || !std::isfinite(spec.eps)) throw Error(ErrorCode::BadValue, "eps must be >= 0");
  if (!(spec.scale > 0.0)) throw Error(ErrorCode::BadValue, "density scale must be > 0");
  ScalarField g(grid, spec.scale);
  const double a = spec.effective_a();
  const double shift = std::pow(spec.eps, a);
  for (const auto& z : spec.zeros) {
    if (z.exponent < 0.0) throw Error(ErrorCode::BadValue, "zero exponent must be >= 0");
    const ScalarField s = squared_norm(z);
    require_same_grid(grid, s.grid());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= std::pow(s[i] + shift, z.exponent);
  }
  for (const auto& p : spec.poles) {
    if (p.exponent < 0.0) throw Error(ErrorCode::BadValue, "pole exponent must be >= 0");
    const ScalarField s = squared_norm(p);
    require_same_grid(grid, s.grid());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= std::pow(std::max(s[i], kSampleFloor) + spec.eps, -p.exponent);
  }
  g.require_finite("density");
  return g;
}

double normalize_c_eps(const Density& spec, const HermitianFormField& omega, const HermitianFormField& alpha,
                       double eps, const ScalarField& volume) {
  require_same_grid(omega.grid(), alpha.grid());
  require_same_grid(omega.grid(), volume.grid());
  HermitianFormField form = omega;
  if (eps != 0.0) form += eps * alpha;
  const double dens = integrate(build_density(omega.grid(), spec.with_eps(eps)), volume);
  if (!(dens > 0.0)) throw Error(ErrorCode::ZeroField, "integral of G_eps Omega vanishes");
  return std::log(class_mass(form) / dens);
}

void match_mass(Density& spec, const HermitianFormField& omega, const ScalarField& volume) {
  Density unit = spec.with_eps(0.0);
  unit.scale = 1.0;
  const double dens = integrate(build_density(omega.grid(), unit), volume);
  if (!(dens > 0.0)) throw Error(ErrorCode::ZeroField, "integral of G_0 Omega vanishes");
  spec.scale = class_mass(omega) / dens;
}

std::vector<double> default_eps_schedule(double start, double floor) {
  if (!(start > 0.0) || !(floor > 0.0) || floor > start)
    throw Error(ErrorCode::ScheduleInvalid, "need 0 < floor <= start");
  std::vector<double> out;
  const int steps = static_cast<int>(std::lround(2.0 * std::log10(start / floor)));
  for (int k = 0; k <= steps; ++k) out.push_back(start * std::pow(10.0, -0.5 * k));
  return out;
}

ContinuationResult continuation_path(const HermitianFormField& omega, const HermitianFormField& alpha,
                                     const Density& spec, double lambda, const std::vector<double>& schedule,
                                     const ScalarField& volume, const SolveOptions& opts) {
  require_schedule(schedule);
  const TorusGrid& grid = omega.grid();
  require_same_grid(grid, alpha.grid());
  require_same_grid(grid, volume.grid());
  ContinuationResult out{ScalarField(grid), {}};
  bool first = true;
  for (double eps : schedule) {
    HermitianFormField form = omega + eps * alpha;
    if (!(form.min_eigenvalue_overall() > 0.0))
      throw Error(ErrorCode::SingularReference, "omega + eps alpha is not positive definite at eps = " + fmt(eps));
    const double c = normalize_c_eps(spec, omega, alpha, eps, volume);
    const ScalarField g = std::exp(c) * build_density(grid, spec.with_eps(eps));
    SolveOptions so = opts;
    if (!first) so.initial = admissible_start(form, out.phi);
    SolveResult r = [&] {
      try {
        return solve_ma(form, g, lambda, &volume, so);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at eps = " + fmt(eps));
      }
    }();
    const double warm = first ? std::numeric_limits<double>::quiet_NaN() : sup_distance(r.phi, out.phi);
    out.rows.push_back({eps, c, oscillation(r.phi), sup_trace(form, r.phi),
                        r.report.residual_history.back(), warm});
    out.phi = std::move(r.phi);
    first = false;
  }
  return out;
}

namespace {

double lp_norm(const ScalarField& f, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p);
  return std::pow(s * f.grid().weight(), 1.0 / p);
}

std::vector<double> lp_distances(const TorusGrid& grid, const Density& spec, double p,
                                 const std::vector<double>& schedule) {
  const ScalarField g0 = build_density(grid, spec.with_eps(0.0));
  std::vector<double> d;
  for (double eps : schedule) d.push_back(lp_norm(build_density(grid, spec.with_eps(eps)) - g0, p));
  return d;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1]) return false;
  return true;
}

}  // namespace

LpCheck lp_convergence_check(const TorusGrid& grid, const Density& spec, double p,
                             const std::vector<double>& schedule) {
  if (!(p > 1.0)) throw Error(ErrorCode::BadValue, "p must be > 1");
  if (grid.resolution() < 16) throw Error(ErrorCode::InvalidArgument, "refinement test needs resolution >= 16");
  for (double e : schedule)
    if (!(e >= 0.0)) throw Error(ErrorCode::ScheduleInvalid, "schedule entries must be >= 0");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1])) throw Error(ErrorCode::ScheduleInvalid, "schedule must decrease");

  LpCheck out;
  out.a = spec.effective_a();
  const ScalarField g0 = build_density(grid, spec.with_eps(0.0));
  const TorusGrid coarse(grid.complex_dim(), grid.resolution() / 2);
  double fine = 0.0, sub = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) fine += std::pow(g0[i], p);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    auto m = coarse.multi_index(i);
    for (auto& c : m) c *= 2;
    sub += std::pow(g0[grid.index(m)], p);
  }
  out.fine_integral = fine * grid.weight();
  out.coarse_integral = sub * coarse.weight();
  if (!std::isfinite(out.fine_integral) ||
      std::abs(out.coarse_integral - out.fine_integral) > 0.01 * out.fine_integral)
    throw Error(ErrorCode::NonIntegrable, "G_0^p integral is not stable under refinement (" +
                                              fmt(out.coarse_integral) + " vs " + fmt(out.fine_integral) + ")");

  out.distances = lp_distances(grid, spec, p, schedule);
  out.decreasing = non_increasing(out.distances);
  out.witness_decreasing = true;
  if (!spec.poles.empty() && !spec.zeros.empty()) {
    Density w = spec;
    w.a = spec.default_a() / 4.0;
    out.witness = lp_distances(grid, w, p, schedule);
    out.witness_decreasing = non_increasing(out.witness);
  }
  return out;
}

ContinuationResult tian_family_run(double base_coefficient, const HermitianFormField& omega_x,
                                   const ScalarField& f, const std::vector<double>& t_schedule,
                                   const SolveOptions& opts) {
  const TorusGrid& grid = omega_x.grid();
  if (grid.complex_dim() != 2) throw Error(ErrorCode::InvalidArgument, "the Tian scenario needs n = 2");
  require_same_grid(grid, f.grid());
  require_schedule(t_schedule);
  if (!(base_coefficient > 0.0)) throw Error(ErrorCode::BadValue, "base form coefficient must be > 0");
  if (!(omega_x.min_eigenvalue_overall() > 0.0))
    throw Error(ErrorCode::SingularReference, "omega_X must be positive definite");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(f[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "f must be >= 0");
  const ScalarField volume = omega_x.determinant();
  const double fmass = integrate(f, volume);
  if (std::abs(fmass - 1.0) > 1e-10)
    throw Error(ErrorCode::MassMismatch, "integral of f omega_X^n is " + fmt(fmass) + ", expected 1");

  const HermitianFormField pullback(grid, HermitianMatrix::diagonal(base_coefficient, 0.0));
  ContinuationResult out{ScalarField(grid), {}};
  bool first = true;
  for (double t : t_schedule) {
    const HermitianFormField form = pullback + t * omega_x;
    const double k = class_mass(form);
    SolveOptions so = opts;
    if (!first) so.initial = admissible_start(form, out.phi);
    SolveResult r = [&] {
      try {
        return solve_ma(form, k * f, 0.0, &volume, so);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at t = " + fmt(t));
      }
    }();
    const double warm = first ? std::numeric_limits<double>::quiet_NaN() : sup_distance(r.phi, out.phi);
    out.rows.push_back({t, k, oscillation(r.phi), sup_trace(form, r.phi), r.report.residual_history.back(), warm});
    out.phi = std::move(r.phi);
    first = false;
  }
  return out;
}

}  // namespace cmat
