#include "cmat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "cmat/error.hpp"

namespace cmat {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& configured_threads() {
  static int threads = 1;
  return threads;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

// Per-thread scratch buffers allocated by fftw_malloc so that their alignment
// matches the buffers the plans were created with.
struct Scratch {
  std::unique_ptr<double, FftwFree> real;
  std::unique_ptr<fftw_complex, FftwFree> spec;
  std::size_t real_size = 0;
  std::size_t spec_size = 0;

  void reserve(std::size_t nr, std::size_t ns) {
    if (nr > real_size) {
      real.reset(static_cast<double*>(fftw_malloc(sizeof(double) * nr)));
      real_size = nr;
    }
    if (ns > spec_size) {
      spec.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ns)));
      spec_size = ns;
    }
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

void check_finite_output(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite value after transform");
}

}  // namespace

void set_fft_threads(int threads) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  static bool initialized = false;
  if (threads > 1 && !initialized) {
    fftw_init_threads();
    initialized = true;
  }
  if (initialized) fftw_plan_with_nthreads(threads < 1 ? 1 : threads);
  configured_threads() = threads < 1 ? 1 : threads;
}

std::shared_ptr<const SpectralPlan> SpectralPlan::get(const TorusGrid& grid) {
  static std::map<std::pair<int, int>, std::shared_ptr<const SpectralPlan>> cache;
  static std::mutex cache_mutex;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(grid.complex_dim(), grid.resolution());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const SpectralPlan>(grid);
  cache.emplace(key, plan);
  return plan;
}

SpectralPlan::SpectralPlan(const TorusGrid& grid) : grid_(grid) {
  const int d = grid.real_dim();
  const int N = grid.resolution();
  const int half = N / 2 + 1;
  spectral_size_ = grid.size() / N * half;

  first_.resize(N);
  square_.resize(N);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < N; ++i) {
    const int k = i <= N / 2 ? i : i - N;
    square_[i] = (two_pi * k) * (two_pi * k);
    first_[i] = (i == N / 2) ? 0.0 : two_pi * k;
  }

  mode_index_.resize(spectral_size_);
  for (std::size_t m = 0; m < spectral_size_; ++m) {
    std::size_t rest = m;
    std::array<std::uint16_t, 4> idx{0, 0, 0, 0};
    idx[d - 1] = static_cast<std::uint16_t>(rest % half);
    rest /= half;
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<std::uint16_t>(rest % N);
      rest /= N;
    }
    mode_index_[m] = idx;
  }

  std::array<int, 4> dims{N, N, N, N};
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::unique_ptr<double, FftwFree> r(static_cast<double*>(fftw_malloc(sizeof(double) * grid.size())));
  std::unique_ptr<fftw_complex, FftwFree> c(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spectral_size_)));
  // Small grids are planned exhaustively enough with MEASURE; the cost is paid
  // once per grid for the lifetime of the process.
  forward_plan_ = fftw_plan_dft_r2c(d, dims.data(), r.get(), c.get(), FFTW_MEASURE);
  inverse_plan_ = fftw_plan_dft_c2r(d, dims.data(), c.get(), r.get(), FFTW_MEASURE);
  if (!forward_plan_ || !inverse_plan_)
    throw Error(ErrorCode::InvalidArgument, "FFTW failed to create a plan");
}

SpectralPlan::~SpectralPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void SpectralPlan::forward(std::span<const double> in, std::span<Complex> out) const {
  Scratch& s = scratch();
  s.reserve(grid_.size(), spectral_size_);
  std::memcpy(s.real.get(), in.data(), sizeof(double) * grid_.size());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real.get(), s.spec.get());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const fftw_complex* c = s.spec.get();
  for (std::size_t m = 0; m < spectral_size_; ++m) out[m] = Complex(c[m][0] * scale, c[m][1] * scale);
}

void SpectralPlan::inverse(std::span<const Complex> in, std::span<double> out) const {
  Scratch& s = scratch();
  s.reserve(grid_.size(), spectral_size_);
  std::memcpy(s.spec.get(), in.data(), sizeof(fftw_complex) * spectral_size_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), s.spec.get(), s.real.get());
  std::memcpy(out.data(), s.real.get(), sizeof(double) * grid_.size());
}

std::vector<Complex> to_spectrum(const ScalarField& f) {
  auto plan = SpectralPlan::get(f.grid());
  std::vector<Complex> spec(plan->spectral_size());
  plan->forward(f.values(), spec);
  return spec;
}

ScalarField from_spectrum(const TorusGrid& grid, std::span<const Complex> spectrum) {
  auto plan = SpectralPlan::get(grid);
  ScalarField out(grid);
  plan->inverse(spectrum, out.values());
  return out;
}

namespace {

template <typename Symbol>
ScalarField apply_symbol(const SpectralPlan& plan, const std::vector<Complex>& spec, Symbol&& symbol) {
  std::vector<Complex> tmp(spec.size());
  for (std::size_t m = 0; m < spec.size(); ++m) tmp[m] = symbol(plan.mode(m)) * spec[m];
  ScalarField out(plan.grid());
  plan.inverse(tmp, out.values());
  return out;
}

}  // namespace

HermitianFormField spectral_dd_bar(const ScalarField& phi) {
  const TorusGrid& grid = phi.grid();
  auto plan = SpectralPlan::get(grid);
  const auto spec = to_spectrum(phi);
  HermitianFormField out(grid);
  if (grid.complex_dim() == 1) {
    auto v = apply_symbol(*plan, spec, [](const ModeWavenumbers& w) {
      return Complex(-0.25 * (w.square[0] + w.square[1]), 0.0);
    });
    check_finite_output(v.values(), "spectral_dd_bar");
    for (std::size_t i = 0; i < grid.size(); ++i) out[i].a11 = v[i];
    return out;
  }
  auto v11 = apply_symbol(*plan, spec, [](const ModeWavenumbers& w) {
    return Complex(-0.25 * (w.square[0] + w.square[1]), 0.0);
  });
  auto v22 = apply_symbol(*plan, spec, [](const ModeWavenumbers& w) {
    return Complex(-0.25 * (w.square[2] + w.square[3]), 0.0);
  });
  // d/dz1 d/dzbar2 = 1/4 [(dx1 dx2 + dy1 dy2) + i (dx1 dy2 - dy1 dx2)]
  auto re12 = apply_symbol(*plan, spec, [](const ModeWavenumbers& w) {
    const auto& k = w.first;
    return Complex(-0.25 * (k[0] * k[2] + k[1] * k[3]), 0.0);
  });
  auto im12 = apply_symbol(*plan, spec, [](const ModeWavenumbers& w) {
    const auto& k = w.first;
    return Complex(-0.25 * (k[0] * k[3] - k[1] * k[2]), 0.0);
  });
  for (auto* f : {&v11, &v22, &re12, &im12}) check_finite_output(f->values(), "spectral_dd_bar");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i].a11 = v11[i];
    out[i].a22 = v22[i];
    out[i].a12 = Complex(re12[i], im12[i]);
  }
  return out;
}

ComplexField spectral_dd_bar_entry(const ScalarField& phi, int j, int k) {
  const TorusGrid& grid = phi.grid();
  const int n = grid.complex_dim();
  if (j < 0 || k < 0 || j >= n || k >= n)
    throw Error(ErrorCode::InvalidArgument, "entry index out of range");
  auto plan = SpectralPlan::get(grid);
  const auto spec = to_spectrum(phi);
  const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
  // d/dz_j = (dx_j - i dy_j)/2 and d/dzbar_k = (dx_k + i dy_k)/2, each
  // derivative contributing a factor i*kappa in Fourier space.
  auto re = apply_symbol(*plan, spec, [&](const ModeWavenumbers& w) {
    if (j == k) return Complex(-0.25 * (w.square[xj] + w.square[yj]), 0.0);
    return Complex(-0.25 * (w.first[xj] * w.first[xk] + w.first[yj] * w.first[yk]), 0.0);
  });
  auto im = apply_symbol(*plan, spec, [&](const ModeWavenumbers& w) {
    if (j == k) return Complex(0.0, 0.0);
    return Complex(-0.25 * (w.first[xj] * w.first[yk] - w.first[yj] * w.first[xk]), 0.0);
  });
  ComplexField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

std::vector<ComplexField> spectral_d(const ComplexField& f) {
  const TorusGrid& grid = f.grid();
  auto plan = SpectralPlan::get(grid);
  const auto sre = to_spectrum(f.real());
  const auto sim = to_spectrum(f.imag());
  std::vector<ComplexField> out;
  for (int j = 0; j < grid.complex_dim(); ++j) {
    const int ax = 2 * j, ay = 2 * j + 1;
    auto dx = [&](const std::vector<Complex>& s) {
      return apply_symbol(*plan, s, [ax](const ModeWavenumbers& w) { return Complex(0.0, w.first[ax]); });
    };
    auto dy = [&](const std::vector<Complex>& s) {
      return apply_symbol(*plan, s, [ay](const ModeWavenumbers& w) { return Complex(0.0, w.first[ay]); });
    };
    const ScalarField ux = dx(sre), uy = dy(sre), vx = dx(sim), vy = dy(sim);
    // d/dz (u + i v) = 1/2 (dx - i dy)(u + i v)
    ComplexField d(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      d[i] = 0.5 * Complex(ux[i] + vy[i], vx[i] - uy[i]);
    out.push_back(std::move(d));
  }
  return out;
}

ScalarField spectral_laplacian(const ScalarField& phi) {
  auto plan = SpectralPlan::get(phi.grid());
  const int d = phi.grid().real_dim();
  auto out = apply_symbol(*plan, to_spectrum(phi), [d](const ModeWavenumbers& w) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += w.square[a];
    return Complex(-s, 0.0);
  });
  check_finite_output(out.values(), "spectral_laplacian");
  return out;
}

ScalarField gaussian_mollify(const ScalarField& phi, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "mollifier scale must be >= 0");
  auto plan = SpectralPlan::get(phi.grid());
  const int d = phi.grid().real_dim();
  return apply_symbol(*plan, to_spectrum(phi), [d, eps](const ModeWavenumbers& w) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += w.square[a];
    return Complex(std::exp(-0.5 * s * eps * eps), 0.0);
  });
}

}  // namespace cmat
