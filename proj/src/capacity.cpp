#include "cmat/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cmat/error.hpp"

namespace cmat {

namespace {

constexpr double kRangeTol = 1e-12;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

void check_mask(const Mask& m, const TorusGrid& grid) {
  require_same_grid(m.grid(), grid);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] != 0.0 && m[i] != 1.0)
      throw Error(ErrorCode::BadValue, "mask entries must be 0 or 1, found " + fmt("%.17g", m[i]) + " at index " +
                                           std::to_string(i));
}

ScalarField clamped_det(const HermitianFormField& form) {
  const int n = form.dim();
  ScalarField d(form.grid());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(0.0, determinant(form[i], n));
  return d;
}

// The total and the masked sum use one loop order, so E = X gives exactly 1.
double masked_share(const ScalarField& density, const Mask& e) {
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    total += density[i];
    if (e[i] == 1.0) inside += density[i];
  }
  return inside == total ? 1.0 : inside / total;
}

double integral_of_exp(const ScalarField& psi, const ScalarField& volume, double alpha, int stride) {
  const TorusGrid& g = psi.grid();
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (stride > 1) {
      const auto m = g.multi_index(i);
      bool on = true;
      for (int a = 0; a < g.real_dim(); ++a) on = on && m[a] % stride == 0;
      if (!on) continue;
    }
    s += std::exp(-alpha * psi[i]) * volume[i];
    ++count;
  }
  return s / static_cast<double>(count);
}

}  // namespace

TestFamily::TestFamily(HermitianFormField gamma) : gamma_(std::move(gamma)) {}

void TestFamily::add(const PotentialInClass& p) {
  require_same_grid(p.potential().grid(), gamma_.grid());
  for (std::size_t i = 0; i < gamma_.size(); ++i) {
    const HermitianMatrix d = p.base()[i] - gamma_[i];
    if (std::abs(d.a11) > 1e-12 || std::abs(d.a22) > 1e-12 || std::abs(d.a12) > 1e-12)
      throw Error(ErrorCode::BaseMismatch, "family member lives in a different class");
  }
  add(p.potential(), p.form());
}

void TestFamily::add(ScalarField potential, HermitianFormField form) {
  require_same_grid(potential.grid(), gamma_.grid());
  require_same_grid(form.grid(), gamma_.grid());
  if (potential.min() < -kRangeTol || potential.max() > 1.0 + kRangeTol)
    throw Error(ErrorCode::BadValue, "family member leaves [0, 1]: range " +
                                         fmt("[%.6g, %.6g]", potential.min(), potential.max()));
  TestPotential t{std::move(potential), std::move(form), ScalarField(gamma_.grid()), 0.0};
  t.density = clamped_det(t.form);
  t.mass = integrate(t.density);
  if (!(t.mass > 0.0)) throw Error(ErrorCode::BadValue, "family member has no Monge-Ampere mass");
  members_.push_back(std::move(t));
}

void TestFamily::add(const ExtremalResult& envelope) {
  require_same_grid(envelope.psi.grid(), gamma_.grid());
  const double s = std::max(envelope.sup, 1.0);
  HermitianFormField form = (1.0 - 1.0 / s) * gamma_ + (1.0 / s) * envelope.form;
  add((1.0 / s) * envelope.psi, std::move(form));
}

TestFamily bundled_family(const HermitianFormField& gamma, const SeedSequence& seeds, int count) {
  TestFamily family(gamma);
  family.add(PotentialInClass(gamma, ScalarField(gamma.grid())));
  auto shared = std::make_shared<const HermitianFormField>(gamma);
  for (int k = 0; k < count; ++k) {
    auto rng = seeds.child(static_cast<std::uint64_t>(k)).engine();
    const int modes = 1 + k % 3;
    const double depth = 0.3 + 0.65 * (k % 5) / 4.0;
    ScalarField phi = random_cone_potential(gamma, rng, modes, depth);
    phi -= phi.min();
    // dividing by a factor above 1 keeps gamma + i ddbar(phi / s) inside the cone
    const double osc = phi.max();
    if (osc > 1.0) phi *= 1.0 / osc;
    family.add(PotentialInClass(shared, std::move(phi)));
  }
  return family;
}

double capacity_estimate(const HermitianFormField& gamma, const Mask& e, const TestFamily& family) {
  if (family.size() == 0) throw Error(ErrorCode::EmptyFamily, "capacity needs a nonempty test family");
  require_same_grid(gamma.grid(), family.gamma().grid());
  check_mask(e, gamma.grid());
  double best = 0.0;
  for (const auto& m : family.members()) best = std::max(best, masked_share(m.density, e));
  return std::clamp(best, 0.0, 1.0);
}

double CapacityProfile::operator()(double x) const {
  auto it = std::upper_bound(s.begin(), s.end(), x);
  if (it == s.begin()) return 0.0;
  return a[static_cast<std::size_t>(it - s.begin()) - 1];
}

CapacityProfile sublevel_profile(const HermitianFormField& gamma, const PotentialInClass& psi,
                                 const std::vector<double>& s_grid, const TestFamily& family) {
  require_same_grid(gamma.grid(), psi.potential().grid());
  if (!psi.normalized())
    throw Error(ErrorCode::NormalizationViolated,
                "sublevel profile needs sup psi = 0, got " + fmt("%.17g", psi.potential().max()));
  if (s_grid.empty()) throw Error(ErrorCode::ScheduleInvalid, "empty level grid");
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    if (!(s_grid[k] < 0.0)) throw Error(ErrorCode::ScheduleInvalid, "levels must be negative");
    if (k > 0 && !(s_grid[k] > s_grid[k - 1])) throw Error(ErrorCode::ScheduleInvalid, "levels must increase");
  }
  const int n = gamma.dim();
  const ScalarField& phi = psi.potential();
  CapacityProfile out;
  out.s = s_grid;
  double running = 0.0;
  Mask e(gamma.grid());
  for (double s : s_grid) {
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = phi[i] < s ? 1.0 : 0.0;
    running = std::max(running, std::pow(capacity_estimate(gamma, e, family), 1.0 / n));
    out.a.push_back(running);
  }
  const ScalarField vol = clamped_det(gamma);
  out.decay_constant = n + integrate(-1.0 * phi, vol) / integrate(vol);
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const double bound = std::pow(out.decay_constant / -s_grid[k], 1.0 / n);
    if (out.a[k] > bound * (1.0 + 1e-12)) out.decay_ok = false;
  }
  return out;
}

KolodziejVerdict kolodziej_bound(const std::vector<double>& v, double b, double delta, double s, double d) {
  const std::size_t m = v.size();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "profile lattice needs at least two points");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(v[i] >= 0.0 && v[i] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "profile values must lie in [0, 1]");
    if (i > 0 && v[i] < v[i - 1]) throw Error(ErrorCode::InvalidArgument, "profile must be non-decreasing");
  }
  if (!(b > 0.0) || !(delta > 0.0)) throw Error(ErrorCode::BadValue, "need B > 0 and delta > 0");
  if (!(s < 0.0) || s < -1.0) throw Error(ErrorCode::BadValue, "need -1 <= S < 0");
  if (!(d >= 0.0 && d <= 1.0) || s + d > 0.0) throw Error(ErrorCode::BadValue, "need D in [0, 1] with S + D <= 0");

  const double step = 1.0 / static_cast<double>(m - 1);
  std::vector<double> powered(m);
  for (std::size_t i = 0; i < m; ++i) powered[i] = b * std::pow(v[i], 1.0 + delta);
  for (std::size_t i = 0; i < m; ++i) {
    if (v[i] == 0.0) continue;
    for (std::size_t j = 0; i + j < m; ++j) {
      const double t_up = std::min(1.0, static_cast<double>(j + 1) * step);
      if (t_up * v[i] > powered[i + j] * (1.0 + 1e-12))
        throw Error(ErrorCode::HypothesisFailed,
                    fmt("t a(s) <= B a(s+t)^(1+delta) fails at s = %.17g, t = %.17g", -1.0 + i * step, j * step));
    }
  }

  auto at = [&](double x) {
    const double r = (x + 1.0) / step;
    const auto k = static_cast<std::size_t>(std::floor(r + 1e-9));
    return v[std::min(k, m - 1)];
  };
  KolodziejVerdict out{};
  out.lhs = d;
  out.applicable = at(s) > 0.0;
  if (!out.applicable) {
    out.rhs = std::numeric_limits<double>::infinity();
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  out.rhs = std::exp(1.0) * (3.0 + 2.0 / delta) * b * std::pow(at(s + d), delta);
  out.margin = out.rhs - out.lhs;
  return out;
}

KolodziejVerdict kolodziej_bound(const std::function<double(double)>& a, double b, double delta, double s, double d,
                                 int lattice) {
  if (lattice < 2) throw Error(ErrorCode::InvalidArgument, "profile lattice needs at least two points");
  std::vector<double> v(static_cast<std::size_t>(lattice));
  for (int i = 0; i < lattice; ++i) v[i] = a(-1.0 + static_cast<double>(i) / (lattice - 1));
  return kolodziej_bound(v, b, delta, s, d);
}

KolodziejVerdict kolodziej_bound(const CapacityProfile& a, double b, double delta, double s, double d,
                                 int lattice) {
  return kolodziej_bound([&a](double x) { return a(x); }, b, delta, s, d, lattice);
}

std::vector<double> random_step_profile(std::mt19937_64& rng, int lattice) {
  std::uniform_int_distribution<int> jumps(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = jumps(rng);
  std::vector<double> levels(k), cuts(k);
  for (auto& l : levels) l = u(rng);
  for (auto& c : cuts) c = u(rng) * lattice;
  std::sort(levels.begin(), levels.end());
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> v(static_cast<std::size_t>(lattice), 0.0);
  for (int j = 0; j < k; ++j)
    for (int i = static_cast<int>(cuts[j]); i < lattice; ++i) v[i] = levels[j];
  return v;
}

IntegralBounds integral_bounds_estimate(const ScalarField& volume, const std::vector<ScalarField>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "integral bounds need at least one sample");
  for (const auto& psi : samples) {
    require_same_grid(psi.grid(), volume.grid());
    psi.require_finite("sample potential");
    if (std::abs(psi.max()) > kRangeTol)
      throw Error(ErrorCode::NormalizationViolated, "samples must satisfy sup psi = 0, got " + fmt("%.17g", psi.max()));
  }
  const int res = volume.grid().resolution();
  const bool refine = res >= 4 && res % 2 == 0;
  double alpha = std::ldexp(1.0, -12);
  for (int k = 0; k <= 12; ++k) {
    const double trial = std::ldexp(1.0, -k);
    bool stable = true;
    if (refine) {
      for (const auto& psi : samples) {
        const double fine = integral_of_exp(psi, volume, trial, 1);
        const double coarse = integral_of_exp(psi, volume, trial, 2);
        if (!(fine <= 2.0 * coarse && coarse <= 2.0 * fine)) {
          stable = false;
          break;
        }
      }
    }
    if (stable) {
      alpha = trial;
      break;
    }
  }
  double c = 0.0;
  for (const auto& psi : samples) {
    c = std::max(c, integral_of_exp(psi, volume, alpha, 1));
    c = std::max(c, integrate(-1.0 * psi, volume));
  }
  return {alpha, 2.0 * c};
}

VolumeCapacity volume_capacity_check(const HermitianFormField& gamma, const ScalarField& volume, const Mask& e,
                                     double alpha, double c, const TestFamily& family) {
  if (!(alpha > 0.0) || !(c > 0.0)) throw Error(ErrorCode::BadValue, "need alpha > 0 and C > 0");
  require_same_grid(volume.grid(), gamma.grid());
  check_mask(e, gamma.grid());
  VolumeCapacity out{};
  out.vol = integrate(e, volume);
  out.cap = capacity_estimate(gamma, e, family);
  if (out.cap == 0.0) {
    if (out.vol > 1e-12)
      throw Error(ErrorCode::HypothesisFailed, "set of zero capacity carries volume " + fmt("%.17g", out.vol));
    out.bound = 0.0;
  } else {
    out.bound = std::exp(alpha) * c * std::exp(-alpha / std::pow(out.cap, 1.0 / gamma.dim()));
  }
  out.margin = out.bound - out.vol;
  return out;
}

CapIntegralCheck cap_integral_check(const PotentialInClass& phi, const PotentialInClass& psi) {
  if (!same_base(phi, psi)) throw Error(ErrorCode::BaseMismatch, "phi and psi must share the class form");
  const ScalarField& p = phi.potential();
  if (p.min() < -kRangeTol || p.max() > 1.0 + kRangeTol) throw Error(ErrorCode::BadValue, "need 0 <= phi <= 1");
  if (psi.potential().max() > kRangeTol) throw Error(ErrorCode::BadValue, "need psi <= 0");
  const int n = phi.base().dim();
  const ScalarField minus_psi = -1.0 * psi.potential();
  const ScalarField base_vol = clamped_det(phi.base());
  CapIntegralCheck out{};
  out.lhs = integrate(minus_psi, clamped_det(phi.form()));
  out.rhs = integrate(minus_psi, base_vol) + n * integrate(base_vol);
  out.margin = out.rhs - out.lhs;
  return out;
}

}  // namespace cmat
