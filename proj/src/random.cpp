#include "cmat/random.hpp"

#include <cmath>
#include <numbers>

#include "cmat/error.hpp"
#include "cmat/spectral.hpp"

namespace cmat {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SeedSequence SeedSequence::child(std::string_view name) const noexcept {
  return SeedSequence(splitmix64(state_ ^ fnv1a(name)));
}

SeedSequence SeedSequence::child(std::uint64_t index) const noexcept {
  return SeedSequence(splitmix64(state_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

ScalarField random_smooth_field(const TorusGrid& grid, std::mt19937_64& rng, int max_mode,
                                double amplitude) {
  if (max_mode < 1 || 2 * max_mode >= grid.resolution())
    throw Error(ErrorCode::InvalidArgument, "max_mode must be in [1, resolution/2)");
  auto plan = SpectralPlan::get(grid);
  const int d = grid.real_dim();
  const double two_pi = 2.0 * std::numbers::pi;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> spec(plan->spectral_size());
  for (std::size_t m = 1; m < spec.size(); ++m) {
    const ModeWavenumbers w = plan->mode(m);
    double k2 = 0.0;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const double k = std::sqrt(w.square[a]) / two_pi;
      if (k > max_mode + 0.5) inside = false;
      k2 += k * k;
    }
    if (!inside) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    spec[m] = Complex(re, im) / (1.0 + k2);
  }
  ScalarField f = from_spectrum(grid, spec);
  f -= f.mean();
  double sup = 0.0;
  for (double v : f.values()) sup = std::max(sup, std::abs(v));
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

double max_cone_scale(const HermitianFormField& base, const HermitianFormField& hessian,
                      double floor) {
  require_same_grid(base.grid(), hessian.grid());
  const int n = base.dim();
  auto ok = [&](double s) {
    for (std::size_t i = 0; i < base.size(); ++i)
      if (min_eigenvalue(base[i] + s * hessian[i], n) < floor) return false;
    return true;
  };
  if (!ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

ScalarField random_cone_potential(const HermitianFormField& base, std::mt19937_64& rng,
                                  int max_mode, double depth) {
  if (!(depth > 0.0 && depth < 1.0))
    throw Error(ErrorCode::InvalidArgument, "cone depth must be in (0, 1)");
  ScalarField psi = random_smooth_field(base.grid(), rng, max_mode, 1.0);
  const HermitianFormField h = spectral_dd_bar(psi);
  const double floor = (1.0 - depth) * base.min_eigenvalue_overall();
  psi *= max_cone_scale(base, h, floor);
  return psi;
}

}  // namespace cmat
