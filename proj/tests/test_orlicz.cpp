#include <cmath>
#include <numbers>

#include "cmat/error.hpp"
#include "cmat/orlicz.hpp"
#include "cmat/random.hpp"
#include "doctest.h"

using namespace cmat;
namespace {
constexpr double kE = std::numbers::e;

// Root of log(e + 1/l)/l = 1 by plain bisection (the P_1 norm of the constant 1).
double llogl_norm_of_one() {
  double lo = 0.5, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::log(kE + 1.0 / mid) / mid > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

ScalarField random_positive(const TorusGrid& g, std::mt19937_64& rng) {
  auto f = random_smooth_field(g, rng, 3, 1.0);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  const double scale = u(rng);
  return f.map([scale](double v) { return scale * std::exp(2.0 * v); });
}
}  // namespace

TEST_SUITE("orlicz") {
  TEST_CASE("gauge evaluation") {
    CHECK(gauge_eval(OrliczGauge::p_beta(1), 0.0) == 0.0);
    CHECK(gauge_eval(OrliczGauge::power(2), 3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(gauge_eval(OrliczGauge::q_beta(1), 1.0) == doctest::Approx(kE - 1.0).epsilon(1e-15));
    CHECK_THROWS_AS(gauge_eval(OrliczGauge::power(2), -1.0), Error);
    CHECK_THROWS_AS(OrliczGauge::power(0.5), Error);
    CHECK(OrliczGauge::parse("plog:2").kind() == OrliczGauge::Kind::PBeta);
    CHECK(OrliczGauge::parse("exp:3").parameter() == 3.0);
    CHECK_THROWS_AS(OrliczGauge::parse("cosh:1"), Error);
  }

  TEST_CASE("gauges are increasing; convex except exp gauges with beta > 1") {
    for (const auto& g : {OrliczGauge::power(1), OrliczGauge::power(2.5), OrliczGauge::p_beta(1),
                          OrliczGauge::p_beta(3), OrliczGauge::q_beta(1), OrliczGauge::q_beta(2),
                          OrliczGauge::q_beta(3)}) {
      CHECK(g(0.0) == 0.0);
      double prev = 0.0, prev_slope = -1.0;
      bool convex = true;
      for (int i = 1; i <= 1000; ++i) {
        const double t = 10.0 * i / 1000.0;
        const double v = g(t);
        const double slope = (v - prev) / 0.01;
        CHECK(v >= prev);
        if (slope < prev_slope - 1e-9 * std::abs(slope)) convex = false;
        prev = v;
        prev_slope = slope;
      }
      // exp(t^{1/b}) - 1 has slope exp(t^{1/b}) t^{1/b - 1} / b, which decreases
      // near 0 when b > 1.
      const bool expect_convex = g.kind() != OrliczGauge::Kind::QBeta || g.parameter() == 1.0;
      CHECK(convex == expect_convex);
      CHECK(g.doubling() == (g.kind() != OrliczGauge::Kind::QBeta));
    }
  }

  TEST_CASE("luxemburg norm scalar oracles") {
    TorusGrid g(1, 16);
    CHECK(luxemburg_norm(ScalarField(g), OrliczGauge::p_beta(1)) == 0.0);
    CHECK(luxemburg_norm(ScalarField(g, 2.75), OrliczGauge::power(1)) ==
          doctest::Approx(2.75).epsilon(1e-13));
    const double oracle = llogl_norm_of_one();
    CHECK(std::abs(luxemburg_norm(ScalarField(g, 1.0), OrliczGauge::p_beta(1)) - oracle) < 1e-12);
  }

  TEST_CASE("doubling gauges satisfy the defining equation at the norm") {
    auto seeds = SeedSequence(41).child("orlicz-equation");
    double worst = 0;
    for (int t = 0; t < 500; ++t) {
      TorusGrid g(1, 16);
      auto rng = seeds.child(t).engine();
      auto f = random_smooth_field(g, rng, 3, 1.0 + t % 7);
      const OrliczGauge gauge = t % 2 ? OrliczGauge::p_beta(1 + t % 3) : OrliczGauge::power(1 + t % 4);
      const double lambda = luxemburg_norm(f, gauge);
      double s = 0;
      for (double v : f.values()) s += gauge(std::abs(v) / lambda);
      worst = std::max(worst, std::abs(s * g.weight() - 1.0));
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("luxemburg norm is order preserving") {
    auto seeds = SeedSequence(43).child("orlicz-order");
    for (int t = 0; t < 100; ++t) {
      TorusGrid g(1, 16);
      auto rng = seeds.child(t).engine();
      auto f = random_smooth_field(g, rng, 3, 1.0);
      auto bump = random_positive(g, rng);
      auto larger = f.map([](double v) { return std::abs(v); }) + bump;
      for (const auto& gauge : {OrliczGauge::p_beta(2), OrliczGauge::q_beta(1), OrliczGauge::power(3)})
        CHECK(luxemburg_norm(f, gauge) <= luxemburg_norm(larger, gauge));
    }
  }

  TEST_CASE("exp norm of one") {
    CHECK(exp_norm_of_one(1, 1) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-15));
    CHECK(exp_norm_of_one(2, 1) == doctest::Approx(1.0 / std::pow(std::log(2.0), 2)).epsilon(1e-15));
    double prev = 0;
    for (double vol : {0.1, 1.0, 10.0, 1e3, 1e6}) {
      CHECK(exp_norm_of_one(1.5, vol) > prev);
      prev = exp_norm_of_one(1.5, vol);
    }
    TorusGrid g(1, 8);
    for (int beta : {1, 2, 3})
      for (double vol : {0.5, 1.0, 2.0}) {
        const double numeric = luxemburg_norm(ScalarField(g, 1.0), OrliczGauge::q_beta(beta), ScalarField(g, vol));
        CHECK(std::abs(numeric - exp_norm_of_one(beta, vol)) < 1e-10);
      }
  }

  TEST_CASE("Young-type constant") {
    CHECK(holder_constant(1) == 1.0);
    // The unit constant is consistent with a brute-force scan for beta = 1.
    const auto p1 = OrliczGauge::p_beta(1), q1 = OrliczGauge::q_beta(1);
    double worst = 0;
    for (int i = -200; i <= 200; ++i)
      for (int j = -200; j <= 100; ++j) {
        const double x = std::exp(i * 0.05), y = std::exp(j * 0.02);
        worst = std::max(worst, x * y / (p1(x) + q1(y)));
      }
    CHECK(worst <= 1.0);
    const double c2 = holder_constant(2);
    const auto p2 = OrliczGauge::p_beta(2), q2 = OrliczGauge::q_beta(2);
    double scan = 0;
    for (int i = -100; i <= 100; ++i)
      for (int j = -100; j <= 100; ++j) {
        const double x = std::exp(i * 0.1), y = std::exp(j * 0.05);
        scan = std::max(scan, x * y / (p2(x) + q2(y)));
      }
    CHECK(c2 >= scan);
    CHECK(c2 < 1.05 * scan);
  }

  TEST_CASE("Holder inequality") {
    TorusGrid g(1, 16);
    auto zero = holder_orlicz(ScalarField(g), ScalarField(g, 1.0), 1);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs >= 0.0);
    auto ones = holder_orlicz(ScalarField(g, 1.0), ScalarField(g, 1.0), 1);
    CHECK(ones.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(ones.rhs - 2.0 * llogl_norm_of_one() / std::log(2.0)) < 1e-11);

    auto seeds = SeedSequence(47).child("holder");
    for (int t = 0; t < 200; ++t) {
      auto rng = seeds.child(t).engine();
      auto f = random_smooth_field(g, rng, 3, 0.5 + t % 5);
      auto h = random_smooth_field(g, rng, 3, 0.5 + t % 3);
      auto r = holder_orlicz(f, h, 1 + t % 3);
      CHECK(r.lhs <= r.rhs);
    }
  }

  TEST_CASE("L log L upper bound") {
    TorusGrid g(1, 16);
    for (int beta : {1, 2}) {
      auto one = llogl_upper_bound(ScalarField(g, 1.0), beta);
      CHECK(one.bound == doctest::Approx(std::pow(std::log(kE + 1.0), beta)).epsilon(1e-14));
      CHECK(one.norm <= one.bound);
    }
    CHECK_THROWS_AS(llogl_upper_bound(ScalarField(g), 1), Error);
    auto seeds = SeedSequence(53).child("llogl");
    for (int t = 0; t < 100; ++t) {
      auto rng = seeds.child(t).engine();
      auto f = random_positive(g, rng);
      auto r = llogl_upper_bound(f, 1 + t % 3);
      CHECK(r.norm <= r.bound);
      auto scaled = llogl_upper_bound(3.0 * f, 1 + t % 3);
      CHECK(scaled.norm <= scaled.bound);
      CHECK(scaled.bound == doctest::Approx(3.0 * r.bound).epsilon(1e-12));
    }
  }

  TEST_CASE("I functional") {
    TorusGrid g(2, 8);
    CHECK(i_functional(ScalarField(g), 2.0, 0.5, 2) == 0.0);
    CHECK(i_functional(ScalarField(g, 2.0), 2.0, 0.5, 2) ==
          doctest::Approx(std::pow(std::log(kE + 1.0), 2.5)).epsilon(1e-13));
    auto rng = SeedSequence(59).engine();
    auto f = random_positive(g, rng);
    CHECK(i_functional(2.0 * f, 1.0, 0.5, 2) > i_functional(f, 1.0, 0.5, 2));
  }
}
