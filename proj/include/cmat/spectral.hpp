#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cmat/field.hpp"

namespace cmat {

// Angular wavenumbers 2*pi*k of one spectral mode. `first` zeroes the Nyquist
// component (odd derivatives of a real field have no Nyquist content) while
// `square` keeps the full (2*pi*k)^2 so pure second derivatives stay invertible.
struct ModeWavenumbers {
  std::array<double, 4> first{};
  std::array<double, 4> square{};
};

// Real-to-complex transform pair for one grid. Plans are created once per grid
// and are immutable afterwards; execution is safe from several threads.
class SpectralPlan {
 public:
  static std::shared_ptr<const SpectralPlan> get(const TorusGrid& grid);

  explicit SpectralPlan(const TorusGrid& grid);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }

  ModeWavenumbers mode(std::size_t m) const noexcept {
    ModeWavenumbers w;
    const auto& idx = mode_index_[m];
    for (int a = 0; a < grid_.real_dim(); ++a) {
      w.first[a] = first_[idx[a]];
      w.square[a] = square_[idx[a]];
    }
    return w;
  }

  // Coefficients are normalized so that the zero mode holds the mean.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  TorusGrid grid_;
  std::size_t spectral_size_;
  std::vector<std::array<std::uint16_t, 4>> mode_index_;
  std::vector<double> first_;
  std::vector<double> square_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Number of threads used by plans created after the call.
void set_fft_threads(int threads);

// Spectrum of a real field, normalized so that spectrum[0] is the mean.
std::vector<Complex> to_spectrum(const ScalarField& f);
ScalarField from_spectrum(const TorusGrid& grid, std::span<const Complex> spectrum);

// Matrix of d^2 phi / dz_j dzbar_k by Fourier differentiation.
HermitianFormField spectral_dd_bar(const ScalarField& phi);
// A single entry d^2 phi / dz_j dzbar_k (0-based j, k) computed from its own
// symbol; used to audit the Hermitian structure of spectral_dd_bar.
ComplexField spectral_dd_bar_entry(const ScalarField& phi, int j, int k);
// d f / dz_j for each j, f complex valued.
std::vector<ComplexField> spectral_d(const ComplexField& f);
// Euclidean Laplacian sum over real axes of d^2/dx_a^2.
ScalarField spectral_laplacian(const ScalarField& phi);
// Convolution with a Gaussian of standard deviation eps per real axis.
ScalarField gaussian_mollify(const ScalarField& phi, double eps);

}  // namespace cmat
