#include "cmat/ma_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cmat/error.hpp"
#include "cmat/spectral.hpp"

namespace cmat {

PotentialInClass::PotentialInClass(std::shared_ptr<const HermitianFormField> base, ScalarField potential)
    : base_(std::move(base)), potential_(std::move(potential)), form_(potential_.grid()) {
  require_same_grid(base_->grid(), potential_.grid());
  potential_.require_finite("potential");
  form_ = *base_ + spectral_dd_bar(potential_);
  const double lo = form_.min_eigenvalue_overall();
  if (!(lo >= -kConeTolerance))
    throw Error(ErrorCode::InvalidArgument,
                "potential leaves the class cone: min eigenvalue " + std::to_string(lo));
  form_.mark_semipositive();
  normalized_ = std::abs(potential_.max()) <= 1e-12;
}

PotentialInClass::PotentialInClass(const HermitianFormField& base, ScalarField potential)
    : PotentialInClass(std::make_shared<const HermitianFormField>(base), std::move(potential)) {}

PotentialInClass PotentialInClass::normalized_copy() const {
  return PotentialInClass(base_, potential_ - potential_.max());
}

bool same_base(const PotentialInClass& a, const PotentialInClass& b) {
  if (a.shared_base() == b.shared_base()) return true;
  const auto& x = a.base();
  const auto& y = b.base();
  if (!(x.grid() == y.grid())) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].a11 != y[i].a11 || x[i].a22 != y[i].a22 || x[i].a12 != y[i].a12) return false;
  return true;
}

ScalarField mixed_ma_measure(const std::vector<MixedEntry>& entries, const HermitianFormField& ref) {
  const int n = ref.dim();
  std::vector<const HermitianFormField*> factors;
  int total = 0;
  for (const auto& e : entries) {
    if (e.power < 0) throw Error(ErrorCode::PowerSumMismatch, "negative power in mixed measure");
    require_same_grid(e.form->grid(), ref.grid());
    total += e.power;
    for (int p = 0; p < e.power; ++p) factors.push_back(e.form);
  }
  if (total != n)
    throw Error(ErrorCode::PowerSumMismatch,
                "powers sum to " + std::to_string(total) + ", expected " + std::to_string(n));
  ScalarField out(ref.grid());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double dr = determinant(ref[i], n);
    if (!(dr > 0.0) || !(min_eigenvalue(ref[i], n) > 0.0))
      throw Error(ErrorCode::SingularReference,
                  "reference form is not positive definite at index " + std::to_string(i));
    const double wedge = n == 1 ? (*factors[0])[i].a11
                                : mixed_determinant((*factors[0])[i], (*factors[1])[i], 2);
    out[i] = wedge / dr;
  }
  return out;
}

ComparisonResult comparison_check(const PotentialInClass& phi, const PotentialInClass& psi) {
  if (!same_base(phi, psi))
    throw Error(ErrorCode::BaseMismatch, "comparison needs potentials in the same class");
  const int n = phi.base().dim();
  const auto& a = phi.potential();
  const auto& b = psi.potential();
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] < b[i])) continue;
    lhs += determinant(psi.form()[i], n);
    rhs += determinant(phi.form()[i], n);
  }
  const double w = a.grid().weight();
  lhs *= w;
  rhs *= w;
  return {lhs, rhs, rhs - lhs};
}

ConeCheck cone_check(const HermitianFormField& form) {
  const double lo = form.min_eigenvalue_overall();
  return {lo >= -kConeTolerance, lo};
}

std::vector<MonotoneProbeRow> monotone_convergence_probe(const PotentialInClass& phi,
                                                         const std::vector<double>& schedule,
                                                         const MonotoneProbeOptions& opts) {
  const TorusGrid& grid = phi.potential().grid();
  const int n = grid.complex_dim();
  if (schedule.empty()) throw Error(ErrorCode::ScheduleInvalid, "empty smoothing schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw Error(ErrorCode::ScheduleInvalid, "schedule entries must be > 0");
    if (i > 0 && !(schedule[i] < schedule[i - 1]))
      throw Error(ErrorCode::ScheduleInvalid, "schedule must be strictly decreasing");
  }
  if (opts.k < 0 || opts.l < 0 || opts.k + opts.l > n)
    throw Error(ErrorCode::PowerSumMismatch, "need 0 <= k, l and k + l <= n");
  if (opts.l > 0 && !opts.t) throw Error(ErrorCode::InvalidArgument, "l > 0 needs the form T");

  const HermitianFormField identity(grid, HermitianMatrix::identity());
  const HermitianFormField& omega = opts.omega ? *opts.omega : identity;
  const HermitianFormField& filler = opts.filler ? *opts.filler : omega;
  const ScalarField one(grid, 1.0);
  const ScalarField& chi = opts.test_function ? *opts.test_function : one;

  auto pairings = [&](const ScalarField& potential, const HermitianFormField& g) {
    std::vector<MixedEntry> e1{{&g, opts.k}, {&filler, n - opts.k - opts.l}};
    if (opts.l > 0) e1.push_back({opts.t, opts.l});
    const double p1 = integrate(mixed_ma_measure(e1, identity) * potential, chi);
    double p2 = std::numeric_limits<double>::quiet_NaN();
    if (opts.k + opts.l + 1 <= n) {
      std::vector<MixedEntry> e2{{&g, opts.k + 1}, {&filler, n - opts.k - opts.l - 1}};
      if (opts.l > 0) e2.push_back({opts.t, opts.l});
      p2 = integrate(mixed_ma_measure(e2, identity), chi);
    }
    return std::pair{p1, p2};
  };
  const auto [ref1, ref2] = pairings(phi.potential(), phi.form());

  // Raw smoothings, then constants from the floor upward so that
  // phi <= phi_floor <= ... <= phi_first pointwise.
  std::vector<ScalarField> raw;
  for (double eps : schedule) raw.push_back(gaussian_mollify(phi.potential(), eps));
  std::vector<double> constants(schedule.size());
  const std::size_t last = schedule.size() - 1;
  constants[last] = (phi.potential() - raw[last]).max();
  for (std::size_t k = last; k-- > 0;)
    constants[k] = constants[k + 1] + (raw[k + 1] - raw[k]).max();

  std::vector<MonotoneProbeRow> rows;
  const ScalarField* previous = nullptr;
  ScalarField prev_storage(grid);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    ScalarField smooth = raw[k] + constants[k];
    if (previous) {
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (smooth[i] > (*previous)[i] + 1e-12)
          throw Error(ErrorCode::ScheduleInvalid,
                      "smoothing family is not decreasing at eps = " + std::to_string(schedule[k]));
    }
    const double eps = schedule[k];
    HermitianFormField g = phi.base() + spectral_dd_bar(smooth);
    g += eps * omega;
    const auto [p1, p2] = pairings(smooth, g);
    rows.push_back({eps, constants[k], p1, std::abs(p1 - ref1), p2, std::abs(p2 - ref2)});
    prev_storage = std::move(smooth);
    previous = &prev_storage;
  }
  return rows;
}

}  // namespace cmat
