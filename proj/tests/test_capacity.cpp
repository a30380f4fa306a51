#include <cmath>
#include <memory>
#include <random>

#include "cmat/capacity.hpp"
#include "cmat/error.hpp"
#include "doctest.h"

using namespace cmat;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

Mask disk(const TorusGrid& g, double radius) {
  Mask k(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    double r2 = 0.0;
    for (int a = 0; a < g.real_dim(); ++a) r2 += (p[a] - 0.5) * (p[a] - 0.5);
    k[i] = r2 < radius * radius ? 1.0 : 0.0;
  }
  return k;
}

// Direct share of each member's mass in E, maximized.
double brute_force_capacity(const TestFamily& family, const Mask& e) {
  double best = 0.0;
  for (const auto& m : family.members()) best = std::max(best, integrate(e, m.density) / integrate(m.density));
  return best;
}

ScalarField normalized_random(const HermitianFormField& gamma, std::mt19937_64& rng, double depth) {
  ScalarField psi = random_cone_potential(gamma, rng, 3, depth);
  return psi - psi.max();
}

}  // namespace

TEST_SUITE("capacity") {
  TEST_CASE("whole space and empty set") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix{1.0, 1.5, Complex(0.2, -0.1)});
    const TestFamily family = bundled_family(gamma, SeedSequence(201));
    CHECK(family.size() == 25);
    CHECK(capacity_estimate(gamma, Mask(g, 1.0), family) == 1.0);
    CHECK(capacity_estimate(gamma, Mask(g, 0.0), family) == 0.0);
    for (const auto& m : family.members()) {
      CHECK(m.potential.min() >= 0.0);
      CHECK(m.potential.max() <= 1.0 + 1e-12);
    }
    CHECK(code_of([&] { capacity_estimate(gamma, Mask(g, 1.0), TestFamily(gamma)); }) == ErrorCode::EmptyFamily);
    CHECK(code_of([&] { capacity_estimate(gamma, Mask(g, 0.5), family); }) == ErrorCode::BadValue);
    CHECK(code_of([&] { TestFamily(gamma).add(ScalarField(g, 2.0), gamma); }) == ErrorCode::BadValue);
  }

  TEST_CASE("half torus against brute force") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    const TestFamily family = bundled_family(gamma, SeedSequence(203));
    Mask half(g);
    for (std::size_t i = 0; i < g.size(); ++i) half[i] = g.point(i)[0] < 0.5 ? 1.0 : 0.0;
    const double cap = capacity_estimate(gamma, half, family);
    CHECK(cap == doctest::Approx(brute_force_capacity(family, half)).epsilon(1e-12));
    CHECK(cap >= 0.5);
    CHECK(cap < 1.0);
  }

  TEST_CASE("monotone in the set and exhaustion") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    const TestFamily family = bundled_family(gamma, SeedSequence(207));
    auto rng = SeedSequence(209).engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      Mask small(g), large(g);
      const double p = u(rng);
      for (std::size_t i = 0; i < g.size(); ++i) {
        small[i] = u(rng) < p ? 1.0 : 0.0;
        large[i] = small[i] == 1.0 || u(rng) < 0.3 ? 1.0 : 0.0;
      }
      CHECK(capacity_estimate(gamma, small, family) <= capacity_estimate(gamma, large, family));
    }
    // E_j grows one slab at a time until it equals E
    Mask target = disk(g, 0.45);
    double prev = 0.0;
    for (int j = 0; j <= 8; ++j) {
      Mask ej(g);
      for (std::size_t i = 0; i < g.size(); ++i) ej[i] = target[i] == 1.0 && g.multi_index(i)[0] < j ? 1.0 : 0.0;
      const double c = capacity_estimate(gamma, ej, family);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(std::abs(prev - capacity_estimate(gamma, target, family)) <= 1e-12);
  }

  TEST_CASE("sublevel profile") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    auto base = std::make_shared<const HermitianFormField>(gamma);
    const TestFamily family = bundled_family(gamma, SeedSequence(211));
    const std::vector<double> levels{-1.0, -0.5, -0.2, -0.1, -0.05, -0.01};

    auto flat = sublevel_profile(gamma, PotentialInClass(base, ScalarField(g)), levels, family);
    for (double a : flat.a) CHECK(a == 0.0);

    auto seeds = SeedSequence(213).child("profile");
    for (int k = 0; k < 5; ++k) {
      auto rng = seeds.child(k).engine();
      PotentialInClass psi(base, normalized_random(gamma, rng, 0.9));
      auto prof = sublevel_profile(gamma, psi, levels, family);
      CHECK(prof.decay_ok);
      for (std::size_t j = 1; j < prof.a.size(); ++j) CHECK(prof.a[j] >= prof.a[j - 1]);
      CHECK(prof(-2.0) == 0.0);
      CHECK(prof(-0.3) == prof.a[1]);
      const PotentialInClass shifted(base, psi.potential() - 0.5);
      CHECK(code_of([&] { sublevel_profile(gamma, shifted, levels, family); }) == ErrorCode::NormalizationViolated);
    }
    CHECK(code_of([&] { sublevel_profile(gamma, PotentialInClass(base, ScalarField(g)), {-0.1, -0.2}, family); }) ==
          ErrorCode::ScheduleInvalid);
  }

  TEST_CASE("Kolodziej iteration lemma") {
    // a == 0: hypothesis holds, conclusion vacuous
    auto zero = kolodziej_bound([](double) { return 0.0; }, 1.0, 0.5, -0.5, 0.3);
    CHECK_FALSE(zero.applicable);

    // constant a0 with B = a0^{-delta} is tight at t = 1
    for (double a0 : {0.05, 0.4, 1.0}) {
      for (double delta : {0.25, 1.0, 3.0}) {
        const double b = std::pow(a0, -delta);
        auto v = kolodziej_bound([a0](double) { return a0; }, b, delta, -0.8, 0.5);
        CHECK(v.applicable);
        CHECK(v.margin == doctest::Approx(std::exp(1.0) * (3.0 + 2.0 / delta) - 0.5).epsilon(1e-12));
        CHECK(code_of([&] { kolodziej_bound([a0](double) { return a0; }, 0.9 * b, delta, -0.8, 0.5); }) ==
              ErrorCode::HypothesisFailed);
      }
    }

    CHECK(code_of([] { kolodziej_bound([](double x) { return -x; }, 1.0, 1.0, -0.5, 0.1); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { kolodziej_bound([](double) { return 0.5; }, 1.0, 1.0, -0.2, 0.5); }) == ErrorCode::BadValue);

    auto rng = SeedSequence(217).engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int accepted = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      const auto v = random_step_profile(rng);
      const double b = 0.5 + 20.0 * u(rng);
      const double delta = 0.1 + 2.0 * u(rng);
      const double s = -1.0 + 0.999 * u(rng);
      const double d = -s * u(rng);
      try {
        auto verdict = kolodziej_bound(v, b, delta, s, d);
        ++accepted;
        CHECK(verdict.margin >= 0.0);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HypothesisFailed);
      }
    }
    CHECK(accepted > 100);
  }

  TEST_CASE("integral bounds") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    ScalarField vol(g, 1.0);
    auto zero = integral_bounds_estimate(vol, {ScalarField(g)});
    CHECK(zero.alpha == 1.0);
    CHECK(zero.c == doctest::Approx(2.0).epsilon(1e-14));

    auto rng = SeedSequence(219).engine();
    std::vector<ScalarField> samples{normalized_random(gamma, rng, 0.8)};
    auto one = integral_bounds_estimate(vol, samples);
    CHECK(one.alpha > 0.0);
    CHECK(std::isfinite(one.c));
    for (const auto& psi : samples) {
      CHECK(integrate(psi.map([&](double x) { return std::exp(-one.alpha * x); }), vol) <= one.c);
      CHECK(integrate(-1.0 * psi, vol) <= one.c);
    }
    samples.push_back(normalized_random(gamma, rng, 0.9));
    auto two = integral_bounds_estimate(vol, samples);
    if (two.alpha == one.alpha) CHECK(two.c >= one.c);

    CHECK(code_of([&] { integral_bounds_estimate(vol, {}); }) == ErrorCode::EmptySamples);
    CHECK(code_of([&] { integral_bounds_estimate(vol, {ScalarField(g, -1.0)}); }) == ErrorCode::NormalizationViolated);
  }

  TEST_CASE("volume against capacity") {
    TorusGrid g(1, 64);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    ScalarField vol(g, 1.0);
    TestFamily family = bundled_family(gamma, SeedSequence(223));
    auto base = std::make_shared<const HermitianFormField>(gamma);
    auto rng = SeedSequence(227).engine();
    std::vector<ScalarField> psis;
    for (int k = 0; k < 3; ++k) psis.push_back(normalized_random(gamma, rng, 0.95));

    std::vector<Mask> sets;
    std::vector<ScalarField> samples = psis;
    for (const auto& psi : psis) {
      for (double s : {-0.3 * oscillation(psi), -0.7 * oscillation(psi)}) {
        Mask e(g);
        for (std::size_t i = 0; i < g.size(); ++i) e[i] = psi[i] < s ? 1.0 : 0.0;
        auto env = extremal_function(gamma, e);
        family.add(env);
        samples.push_back(env.psi - env.sup);
        sets.push_back(e);
      }
    }
    const auto ib = integral_bounds_estimate(vol, samples);
    for (const auto& e : sets) {
      auto r = volume_capacity_check(gamma, vol, e, ib.alpha, ib.c, family);
      CHECK(r.margin >= 0.0);
      CHECK(r.cap > 0.0);
    }
    auto whole = volume_capacity_check(gamma, vol, Mask(g, 1.0), ib.alpha, ib.c, family);
    CHECK(whole.bound == doctest::Approx(ib.c).epsilon(1e-14));
    CHECK(whole.vol <= whole.bound);
    auto empty = volume_capacity_check(gamma, vol, Mask(g, 0.0), ib.alpha, ib.c, family);
    CHECK(empty.vol == 0.0);
    CHECK(empty.margin >= 0.0);

    // a family blind to the left half reports zero capacity on a set with volume
    HermitianFormField blind(g, HermitianMatrix::identity());
    Mask left(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      left[i] = g.point(i)[0] < 0.5 ? 1.0 : 0.0;
      blind[i].a11 = left[i] == 1.0 ? 0.0 : 2.0;
    }
    TestFamily narrow(gamma);
    narrow.add(ScalarField(g), blind);
    CHECK(code_of([&] { volume_capacity_check(gamma, vol, left, ib.alpha, ib.c, narrow); }) ==
          ErrorCode::HypothesisFailed);
  }

  TEST_CASE("weighted integral inequality for the capacity") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix{1.2, 0.9, Complex(0.1, 0.2)});
    auto base = std::make_shared<const HermitianFormField>(gamma);
    auto seeds = SeedSequence(229).child("cap-integral");
    for (int k = 0; k < 50; ++k) {
      auto rng = seeds.child(k).engine();
      ScalarField phi = random_cone_potential(gamma, rng, 1 + k % 3, 0.5 + 0.45 * (k % 7) / 6.0);
      phi -= phi.min();
      if (phi.max() > 1.0) phi *= 1.0 / phi.max();
      const auto r = cap_integral_check(PotentialInClass(base, phi),
                                        PotentialInClass(base, normalized_random(gamma, rng, 0.9)));
      CHECK(r.margin >= -1e-10);
    }
  }

  TEST_CASE("extremal function of a disk") {
    TorusGrid g(1, 64);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    const Mask k = disk(g, 0.2);
    auto r = extremal_function(gamma, k);
    CHECK(r.psi.min() >= 0.0);
    double on_k = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (k[i] == 1.0) on_k = std::max(on_k, std::abs(r.psi[i]));
    CHECK(on_k <= 1e-6);
    CHECK(r.form.min_eigenvalue_overall() >= -1e-8);
    CHECK(mass_near(r, k) >= 0.99);
    CHECK(r.sup > 0.0);

    auto whole = extremal_function(gamma, Mask(g, 1.0));
    CHECK(whole.psi.max() == 0.0);
    CHECK(whole.sweeps == 1);

    CHECK(code_of([&] { extremal_function(gamma, Mask(g, 0.0)); }) == ErrorCode::NonMassiveSet);
    ExtremalOptions tight;
    tight.max_sweeps = 2;
    CHECK(code_of([&] { extremal_function(gamma, k, tight); }) == ErrorCode::SweepStalled);
  }

  TEST_CASE("extremal function of a ball in two variables") {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    const Mask k = disk(g, 0.3);
    auto r = extremal_function(gamma, k);
    CHECK(r.psi.min() >= 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (k[i] == 1.0) CHECK(r.psi[i] == 0.0);
    CHECK(mass_near(r, k) >= 0.9);
  }
}
