#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cmat/field.hpp"

namespace cmat {

// Named splittable seed: every randomized family derives its own stream from a
// single run seed, so adding a family never perturbs the others.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t seed) noexcept : state_(seed) {}

  SeedSequence child(std::string_view name) const noexcept;
  SeedSequence child(std::uint64_t index) const noexcept;
  std::uint64_t value() const noexcept { return state_; }
  std::mt19937_64 engine() const { return std::mt19937_64(state_); }

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Real trigonometric polynomial with all wavenumbers |k_a| <= max_mode,
// coefficients decaying like 1/(1+|k|^2), zero mean, scaled to sup-norm
// `amplitude`.
ScalarField random_smooth_field(const TorusGrid& grid, std::mt19937_64& rng, int max_mode,
                                double amplitude);

// Largest s >= 0 such that base + s i ddbar(psi) keeps min eigenvalue >= floor
// everywhere (bisection on a concave function of s).
double max_cone_scale(const HermitianFormField& base, const HermitianFormField& hessian,
                      double floor);

// Random band-limited potential phi with base + i ddbar phi >= (1 - depth) times
// the smallest eigenvalue of base, where depth in (0, 1) measures how close the
// potential comes to the cone boundary.
ScalarField random_cone_potential(const HermitianFormField& base, std::mt19937_64& rng,
                                  int max_mode, double depth);

}  // namespace cmat
