#include "cmat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cmat/error.hpp"
#include "cmat/spectral.hpp"

namespace cmat {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// Fourier symbols of the Hessian entries, cached per solve.
struct HessianSymbols {
  Vec s11, s22, r12, i12;       // pure second derivatives keep the Nyquist mode
  Vec f11, f22;                 // diagonal entries from first-derivative products
  std::vector<std::array<double, 4>> first;
  std::vector<char> nyquist;    // some axis sits at the Nyquist wavenumber

  explicit HessianSymbols(const SpectralPlan& plan) {
    const std::size_t m = plan.spectral_size();
    const int n = plan.grid().complex_dim();
    s11.resize(m);
    f11.resize(m);
    first.resize(m);
    nyquist.assign(m, 0);
    if (n == 2) {
      s22.resize(m);
      r12.resize(m);
      i12.resize(m);
      f22.resize(m);
    }
    for (std::size_t k = 0; k < m; ++k) {
      const ModeWavenumbers w = plan.mode(k);
      const auto& q = w.first;
      first[k] = q;
      for (int a = 0; a < 2 * n; ++a)
        if (q[a] == 0.0 && w.square[a] != 0.0) nyquist[k] = 1;
      s11[k] = -0.25 * (w.square[0] + w.square[1]);
      f11[k] = -0.25 * (q[0] * q[0] + q[1] * q[1]);
      if (n == 2) {
        s22[k] = -0.25 * (w.square[2] + w.square[3]);
        f22[k] = -0.25 * (q[2] * q[2] + q[3] * q[3]);
        r12[k] = -0.25 * (q[0] * q[2] + q[1] * q[3]);
        i12[k] = -0.25 * (q[0] * q[3] - q[1] * q[2]);
      }
    }
  }
};

// Scratch space and transforms shared by the Newton operators.
class SpectralWork {
 public:
  SpectralWork(const TorusGrid& grid)
      : grid_(grid), plan_(SpectralPlan::get(grid)), sym_(*plan_),
        spec_(plan_->spectral_size()), tmp_(plan_->spectral_size()) {}

  const SpectralPlan& plan() const { return *plan_; }
  const HessianSymbols& symbols() const { return sym_; }
  std::vector<Complex>& spec() { return spec_; }

  void forward(const Vec& in) { plan_->forward(in, spec_); }

  // Inverse transform of spec_ multiplied by a real symbol.
  void inverse_times(const Vec& symbol, Vec& out) {
    for (std::size_t k = 0; k < spec_.size(); ++k) tmp_[k] = symbol[k] * spec_[k];
    plan_->inverse(tmp_, out);
  }
  // Inverse transform of spec_ multiplied by i * first[axis].
  void inverse_derivative(int axis, Vec& out) {
    for (std::size_t k = 0; k < spec_.size(); ++k)
      tmp_[k] = Complex(0.0, sym_.first[k][axis]) * spec_[k];
    plan_->inverse(tmp_, out);
  }
  void inverse(Vec& out) { plan_->inverse(spec_, out); }

  // Hessian of the field whose spectrum is in spec_.
  void hessian(std::vector<HermitianMatrix>& out) {
    const int n = grid_.complex_dim();
    out.resize(grid_.size());
    a_.resize(grid_.size());
    inverse_times(sym_.s11, a_);
    for (std::size_t i = 0; i < a_.size(); ++i) out[i].a11 = a_[i];
    if (n == 1) return;
    inverse_times(sym_.s22, a_);
    for (std::size_t i = 0; i < a_.size(); ++i) out[i].a22 = a_[i];
    b_.resize(grid_.size());
    inverse_times(sym_.r12, a_);
    inverse_times(sym_.i12, b_);
    for (std::size_t i = 0; i < a_.size(); ++i) out[i].a12 = Complex(a_[i], b_[i]);
  }

 private:
  TorusGrid grid_;
  std::shared_ptr<const SpectralPlan> plan_;
  HessianSymbols sym_;
  std::vector<Complex> spec_, tmp_;
  Vec a_, b_;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations, starting
// from x = 0. Returns the number of operator applications.
int gmres(const std::function<void(const Vec&, Vec&)>& apply, const Vec& b, Vec& x, int restart,
          int max_iters, double rel_tol) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return 0;
  int total = 0;
  Vec r = b, w(n);
  std::vector<Vec> basis(restart + 1, Vec(n));
  while (total < max_iters) {
    const double beta = norm2(r);
    if (beta <= rel_tol * bnorm) break;
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::vector<std::vector<double>> h(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), g(restart + 1, 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < restart && total < max_iters; ++j) {
      apply(basis[j], w);
      ++total;
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(w, basis[i]);
        for (std::size_t k = 0; k < n; ++k) w[k] -= h[i][j] * basis[i][k];
      }
      h[j + 1][j] = norm2(w);
      if (h[j + 1][j] > 0.0)
        for (std::size_t k = 0; k < n; ++k) basis[j + 1][k] = w[k] / h[j + 1][j];
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = denom > 0.0 ? h[j][j] / denom : 1.0;
      sn[j] = denom > 0.0 ? h[j + 1][j] / denom : 0.0;
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= rel_tol * bnorm || h[j][j] == 0.0) {
        ++j;
        break;
      }
    }
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h[i][k] * y[k];
      y[i] = h[i][i] != 0.0 ? s / h[i][i] : 0.0;
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * basis[i][k];
    // true residual for the restart
    apply(x, w);
    ++total;
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - w[k];
    if (norm2(r) <= rel_tol * bnorm) break;
  }
  return total;
}

// Preconditioned conjugate gradients from x = 0.
int pcg(const std::function<void(const Vec&, Vec&)>& apply,
        const std::function<void(const Vec&, Vec&)>& precondition, const Vec& b, Vec& x,
        int max_iters, double rel_tol) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return 0;
  Vec r = b, z(n), p(n), q(n);
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  int it = 0;
  for (; it < max_iters; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    if (norm2(r) <= rel_tol * bnorm) {
      ++it;
      break;
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  return it;
}

struct NewtonState {
  std::vector<HermitianMatrix> g;  // omega + i ddbar phi
  Vec residual;                    // F - c
  double c = 0.0;                  // weighted mean removed for lambda = 0
  double sup = 0.0;
  double min_eig = 0.0;
  double mass = 0.0;
};

// Evaluates F = log det g - log rhs - lambda phi at a trial point. Returns false
// when g leaves the positivity floor.
bool evaluate(const std::vector<HermitianMatrix>& g, const Vec& phi, const Vec& log_rhs, double lambda,
              int n, double floor, NewtonState& s) {
  const std::size_t size = g.size();
  s.residual.resize(size);
  double lo = std::numeric_limits<double>::infinity();
  double wsum = 0.0, wf = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double e = min_eigenvalue(g[i], n);
    lo = std::min(lo, e);
    if (!(e >= floor)) {
      s.min_eig = lo;
      return false;
    }
    const double d = determinant(g[i], n);
    const double F = std::log(d) - log_rhs[i] - lambda * phi[i];
    s.residual[i] = F;
    mass += d;
    if (lambda == 0.0) {
      wsum += d;
      wf += d * F;
    }
  }
  s.min_eig = lo;
  s.mass = mass / static_cast<double>(size);
  s.c = lambda == 0.0 ? wf / wsum : 0.0;
  double sup = 0.0;
  for (double& r : s.residual) {
    r -= s.c;
    sup = std::max(sup, std::abs(r));
  }
  s.sup = sup;
  return std::isfinite(sup);
}

}  // namespace

double equation_residual(const HermitianFormField& omega, const ScalarField& phi, const ScalarField& f,
                         double lambda, double kappa, const ScalarField* omega_weight) {
  require_same_grid(omega.grid(), phi.grid());
  require_same_grid(omega.grid(), f.grid());
  const int n = omega.dim();
  const HermitianFormField g = omega + spectral_dd_bar(phi);
  double sup = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double w = omega_weight ? (*omega_weight)[i] : determinant(omega[i], n);
    const double r = std::log(determinant(g[i], n)) - std::log(kappa * f[i] * w) - lambda * phi[i];
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

SolveResult solve_ma(const HermitianFormField& omega, const ScalarField& f, double lambda,
                     const ScalarField* omega_weight, const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const TorusGrid& grid = omega.grid();
  require_same_grid(grid, f.grid());
  if (omega_weight) require_same_grid(grid, omega_weight->grid());
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::BadValue, "lambda must be finite and >= 0");
  if (!(opts.residual_tol > 0.0) || opts.max_newton_iters < 0 || opts.max_halvings < 0)
    throw Error(ErrorCode::BadValue, "solver tolerances must be positive");
  f.require_finite("density f");
  const int n = grid.complex_dim();
  const std::size_t size = grid.size();

  const double omega_min = omega.min_eigenvalue_overall();
  if (!(omega_min > 0.0))
    throw Error(ErrorCode::SingularReference, "omega must be positive definite for solve_ma");
  Vec volume(size);
  for (std::size_t i = 0; i < size; ++i) {
    volume[i] = omega_weight ? (*omega_weight)[i] : determinant(omega[i], n);
    if (!(volume[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "volume weight must be > 0");
    if (!(f[i] > 0.0))
      throw Error(ErrorCode::InvalidArgument,
                  "density must be > 0 pointwise for the nondegenerate solver (index " +
                      std::to_string(i) + ")");
  }

  double kappa = 1.0;
  if (lambda == 0.0) {
    double fmass = 0.0;
    for (std::size_t i = 0; i < size; ++i) fmass += f[i] * volume[i];
    fmass /= static_cast<double>(size);
    const double omass = class_mass(omega);
    kappa = omass / fmass;
    if (!opts.rescale_mass && std::abs(kappa - 1.0) > 1e-12)
      throw Error(ErrorCode::MassMismatch, "integral of f Omega differs from the class mass (ratio " +
                                               std::to_string(kappa) + ")");
  }
  Vec log_rhs(size);
  for (std::size_t i = 0; i < size; ++i) log_rhs[i] = std::log(kappa * f[i] * volume[i]);

  SolveReport report;
  report.lambda = lambda;
  SpectralWork work(grid);
  const HessianSymbols& sym = work.symbols();

  Vec phi(size, 0.0);
  if (opts.initial) {
    require_same_grid(grid, opts.initial->grid());
    opts.initial->require_finite("initial potential");
    phi.assign(opts.initial->values().begin(), opts.initial->values().end());
    if (lambda == 0.0) {
      double m = 0.0;
      for (double v : phi) m += v;
      m /= static_cast<double>(size);
      for (double& v : phi) v -= m;
    }
  }
  const double floor = 1e-8 * omega_min;

  std::vector<HermitianMatrix> g(size), hv(size), trial(size);
  work.forward(phi);
  work.hessian(hv);
  for (std::size_t i = 0; i < size; ++i) g[i] = omega[i] + hv[i];

  NewtonState state;
  if (!evaluate(g, phi, log_rhs, lambda, n, floor, state))
    throw Error(ErrorCode::ConeExit, "initial potential is outside the cone (min eigenvalue " +
                                         std::to_string(state.min_eig) + ")");
  report.residual_history.push_back(state.sup);
  report.mass_history.push_back(state.mass);
  report.min_cone_eigenvalue = state.min_eig;

  Vec rhs(size), y, v(size), ginv_flat;
  std::vector<HermitianMatrix> ginv(size), adj(size);
  Vec det(size);
  Vec work_a(size), work_b(size);

  int iter = 0;
  while (state.sup > opts.residual_tol) {
    if (iter >= opts.max_newton_iters)
      throw Error(ErrorCode::NoConvergence,
                  "Newton did not reach tolerance in " + std::to_string(iter) +
                      " iterations (residual " + std::to_string(state.sup) + ")");
    ++iter;
    const double eta = std::clamp(0.01 * state.sup, 1e-12, 1e-2);

    if (opts.linear_solver == LinearSolver::Gmres) {
      HermitianMatrix mean_inv;
      for (std::size_t i = 0; i < size; ++i) {
        ginv[i] = inverse(g[i], n);
        mean_inv += ginv[i];
      }
      mean_inv *= 1.0 / static_cast<double>(size);
      Vec pinv(sym.s11.size());
      for (std::size_t k = 0; k < pinv.size(); ++k) {
        double s = mean_inv.a11 * sym.s11[k];
        if (n == 2)
          s += mean_inv.a22 * sym.s22[k] +
               2.0 * (mean_inv.a12.real() * sym.r12[k] + mean_inv.a12.imag() * sym.i12[k]);
        s -= lambda;
        pinv[k] = s != 0.0 ? 1.0 / s : 0.0;
      }
      // J M^{-1} y: transform y, divide by the symbol, then form the Hessian.
      auto apply = [&](const Vec& in, Vec& out) {
        work.forward(in);
        for (std::size_t k = 0; k < pinv.size(); ++k) work.spec()[k] *= pinv[k];
        work.hessian(hv);
        out.resize(size);
        if (lambda != 0.0) work.inverse(work_a);
        for (std::size_t i = 0; i < size; ++i) {
          out[i] = trace_product(ginv[i], hv[i], n);
          if (lambda != 0.0) out[i] -= lambda * work_a[i];
        }
      };
      for (std::size_t i = 0; i < size; ++i) rhs[i] = -state.residual[i];
      const int its = gmres(apply, rhs, y, opts.krylov_restart, opts.max_krylov_iters, eta);
      report.krylov_iterations.push_back(its);
      work.forward(y);
      for (std::size_t k = 0; k < pinv.size(); ++k) work.spec()[k] *= pinv[k];
    } else {
      double mean_det = 0.0;
      HermitianMatrix mean_adj;
      for (std::size_t i = 0; i < size; ++i) {
        det[i] = determinant(g[i], n);
        adj[i] = adjugate(g[i], n);
        mean_det += det[i];
        mean_adj += adj[i];
      }
      mean_det /= static_cast<double>(size);
      mean_adj *= 1.0 / static_cast<double>(size);
      // Flat symbol of -Re S + lambda det g with first-derivative products.
      Vec pinv(sym.f11.size());
      for (std::size_t k = 0; k < pinv.size(); ++k) {
        double s = mean_adj.a11 * sym.f11[k];
        if (n == 2)
          s += mean_adj.a22 * sym.f22[k] +
               2.0 * (mean_adj.a12.real() * sym.r12[k] + mean_adj.a12.imag() * sym.i12[k]);
        s = -s + lambda * mean_det;
        // Nyquist modes carry no first derivative, so the divergence form cannot
        // see them; they are projected out together with any kernel mode.
        pinv[k] = !sym.nyquist[k] && s > 1e-14 * (1.0 + lambda * mean_det) ? 1.0 / s : 0.0;
      }
      std::vector<Vec> d(2 * n, Vec(size));
      std::vector<std::vector<Complex>> wspec(2 * n, std::vector<Complex>(pinv.size()));
      auto apply = [&](const Vec& in, Vec& out) {
        work.forward(in);
        for (int a = 0; a < 2 * n; ++a) work.inverse_derivative(a, d[a]);
        // W_j = sum_k adj_{kj} dbar_k v with dbar_k v = (v_xk + i v_yk)/2
        Vec wr1(size), wi1(size), wr2, wi2;
        if (n == 2) {
          wr2.resize(size);
          wi2.resize(size);
        }
        for (std::size_t i = 0; i < size; ++i) {
          const Complex d1 = 0.5 * Complex(d[0][i], d[1][i]);
          if (n == 1) {
            wr1[i] = d1.real();
            wi1[i] = d1.imag();
            continue;
          }
          const Complex d2 = 0.5 * Complex(d[2][i], d[3][i]);
          const HermitianMatrix& a = adj[i];
          const Complex w1 = a.a11 * d1 + std::conj(a.a12) * d2;
          const Complex w2 = a.a12 * d1 + a.a22 * d2;
          wr1[i] = w1.real();
          wi1[i] = w1.imag();
          wr2[i] = w2.real();
          wi2[i] = w2.imag();
        }
        // Re sum_j d_j W_j = 1/2 sum_j (dx_j Re W_j + dy_j Im W_j)
        std::vector<Complex> acc(pinv.size(), Complex{});
        auto add_derivative = [&](const Vec& field, int axis) {
          work.plan().forward(field, wspec[0]);
          for (std::size_t k = 0; k < acc.size(); ++k)
            acc[k] += 0.5 * Complex(0.0, sym.first[k][axis]) * wspec[0][k];
        };
        add_derivative(wr1, 0);
        add_derivative(wi1, 1);
        if (n == 2) {
          add_derivative(wr2, 2);
          add_derivative(wi2, 3);
        }
        if (lambda != 0.0) {
          for (std::size_t i = 0; i < size; ++i) wr1[i] = lambda * det[i] * in[i];
          work.plan().forward(wr1, wspec[0]);
        }
        for (std::size_t k = 0; k < acc.size(); ++k)
          acc[k] = pinv[k] == 0.0 ? Complex{} : (lambda != 0.0 ? wspec[0][k] : Complex{}) - acc[k];
        out.resize(size);
        work.plan().inverse(acc, out);
      };
      auto precondition = [&](const Vec& in, Vec& out) {
        work.forward(in);
        for (std::size_t k = 0; k < pinv.size(); ++k) work.spec()[k] *= pinv[k];
        out.resize(size);
        work.inverse(out);
      };
      for (std::size_t i = 0; i < size; ++i) rhs[i] = det[i] * state.residual[i];
      work.forward(rhs);
      for (std::size_t k = 0; k < pinv.size(); ++k)
        if (pinv[k] == 0.0) work.spec()[k] = 0.0;
      work.inverse(rhs);
      const int its = pcg(apply, precondition, rhs, y, opts.max_krylov_iters, eta);
      report.krylov_iterations.push_back(its);
      work.forward(y);
    }
    // Newton direction v and its Hessian from the spectrum left in the work area.
    work.hessian(hv);
    work.inverse(v);
    if (lambda == 0.0) {
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(size);
      for (double& x : v) x -= m;
    }

    double t = 1.0;
    bool accepted = false, any_positive = false;
    NewtonState next;
    Vec phi_trial(size);
    for (int halving = 0; halving <= opts.max_halvings; ++halving, t *= 0.5) {
      for (std::size_t i = 0; i < size; ++i) {
        phi_trial[i] = phi[i] + t * v[i];
        trial[i] = g[i] + t * hv[i];
      }
      if (!evaluate(trial, phi_trial, log_rhs, lambda, n, floor, next)) continue;
      any_positive = true;
      if (next.sup < state.sup) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!any_positive)
        throw Error(ErrorCode::ConeExit, "line search cannot keep omega + i ddbar phi positive (iteration " +
                                             std::to_string(iter) + ")");
      throw Error(ErrorCode::NoConvergence, "line search cannot decrease the residual (iteration " +
                                                std::to_string(iter) + ", residual " +
                                                std::to_string(state.sup) + ")");
    }
    phi.swap(phi_trial);
    g.swap(trial);
    state = std::move(next);
    report.residual_history.push_back(state.sup);
    report.mass_history.push_back(state.mass);
    report.min_cone_eigenvalue = std::min(report.min_cone_eigenvalue, state.min_eig);
  }

  ScalarField out(grid, std::move(phi));
  if (lambda == 0.0) out -= out.max();
  report.iterations = iter;
  report.normalizing_constant = kappa * std::exp(state.c);
  report.oscillation = oscillation(out);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(out), std::move(report)};
}

// ------------------------------------------------------------------ Yau scheme

YauStart yau_initial_pair(const HermitianFormField& omega, const ScalarField& h, const SolveOptions& opts) {
  const ScalarField eh = h.map([](double v) { return std::exp(v); });
  SolveResult r = solve_ma(omega, eh, 0.0, nullptr, opts);
  ScalarField shifted = h + std::log(r.report.normalizing_constant);
  ScalarField upper = r.phi - r.phi.min();
  ScalarField lower = r.phi - r.phi.max();
  return {std::move(shifted), std::move(upper), std::move(lower)};
}

namespace {

// Largest amount by which a <= b fails.
double excess(const ScalarField& a, const ScalarField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, a[i] - b[i]);
  return e;
}

double laplacian_sup(const HermitianFormField& omega, const ScalarField& phi) {
  const int n = omega.dim();
  const HermitianFormField g = omega + spectral_dd_bar(phi);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    best = std::max(best, 2.0 * trace_product(inverse(omega[i], n), g[i], n));
  return best;
}

}  // namespace

YauResult yau_iteration(const HermitianFormField& omega, const ScalarField& h, double lambda,
                        const ScalarField& upper0, const ScalarField& lower0, const YauOptions& opts) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::BadValue, "Yau iteration needs lambda > 0");
  require_same_grid(omega.grid(), h.grid());
  YauResult out{{upper0}, {lower0}, ScalarField(h.grid()), 0.0, {}, {}, 0.0};
  out.gaps.push_back(sup_distance(upper0, lower0));
  out.max_violation = excess(lower0, upper0);
  if (opts.monitor_laplacian) out.laplacian_sup.push_back(laplacian_sup(omega, upper0));

  auto step = [&](const ScalarField& prev) {
    const ScalarField rhs = (h - prev).map([](double v) { return std::exp(v); });
    SolveOptions so = opts.solve;
    so.initial = prev;
    return solve_ma(omega, rhs, lambda + 1.0, nullptr, so).phi;
  };

  for (int j = 1; j <= opts.max_iterations; ++j) {
    ScalarField up = step(out.upper.back());
    ScalarField lo = step(out.lower.back());
    // lower_0 <= lower_{j-1} <= lower_j <= upper_j <= upper_{j-1} <= upper_0
    const double v = std::max({excess(lower0, out.lower.back()), excess(out.lower.back(), lo),
                               excess(lo, up), excess(up, out.upper.back()),
                               excess(out.upper.back(), upper0)});
    out.max_violation = std::max(out.max_violation, v);
    if (v > opts.chain_tol)
      throw Error(ErrorCode::ChainViolation, "Yau chain inequality broken by " + std::to_string(v) +
                                                 " at iterate " + std::to_string(j));
    out.gaps.push_back(sup_distance(up, lo));
    if (opts.monitor_laplacian) out.laplacian_sup.push_back(laplacian_sup(omega, up));
    out.upper.push_back(std::move(up));
    out.lower.push_back(std::move(lo));
    if (out.gaps.back() <= opts.stop_gap) break;
  }
  if (out.gaps.back() > opts.stop_gap)
    throw Error(ErrorCode::NoConvergence, "Yau chains did not meet within " +
                                              std::to_string(opts.max_iterations) + " iterations");
  out.limit = 0.5 * (out.upper.back() + out.lower.back());
  for (std::size_t j = 1; j < out.laplacian_sup.size(); ++j)
    out.fitted_c2 = std::max(out.fitted_c2, 2.0 * out.laplacian_sup[j] - out.laplacian_sup[j - 1]);
  return out;
}

double uniqueness_probe(const HermitianFormField& omega, const ScalarField& f, double lambda,
                        const std::vector<ScalarField>& inits, const SolveOptions& opts) {
  std::vector<ScalarField> solutions;
  for (const auto& init : inits) {
    SolveOptions so = opts;
    so.initial = init;
    solutions.push_back(solve_ma(omega, f, lambda, nullptr, so).phi);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < solutions.size(); ++a)
    for (std::size_t b = a + 1; b < solutions.size(); ++b)
      worst = std::max(worst, sup_distance(solutions[a], solutions[b]));
  return worst;
}

double stability_exponent(int n, double eps0) {
  if (!(eps0 > 0.0)) throw Error(ErrorCode::BadValue, "eps0 must be > 0");
  return 1.0 / (n + 1.0 + n * n / eps0);
}

StabilityRow stability_probe(const HermitianFormField& omega, const ScalarField& f, const ScalarField& g,
                             double eps0, std::optional<double> constant, const SolveOptions& opts) {
  const ScalarField phi = solve_ma(omega, f, 0.0, nullptr, opts).phi;
  const ScalarField psi = solve_ma(omega, g, 0.0, nullptr, opts).phi;
  StabilityRow row{l1_distance(phi, psi), sup_distance(phi, psi), std::numeric_limits<double>::quiet_NaN()};
  if (constant && row.l1_dist > 0.0 && row.l1_dist < 1.0) {
    const double a0 = stability_exponent(omega.dim(), eps0);
    row.bound = 2.0 * std::pow(*constant, a0) * std::pow(std::log(1.0 / row.l1_dist), -a0);
  } else if (constant && row.l1_dist == 0.0) {
    row.bound = 0.0;
  }
  return row;
}

StabilityLadder stability_ladder(const HermitianFormField& omega, const ScalarField& f,
                                 const std::vector<ScalarField>& perturbed, double eps0,
                                 const SolveOptions& opts) {
  if (perturbed.empty()) throw Error(ErrorCode::InvalidArgument, "stability ladder needs a rung");
  const double a0 = stability_exponent(omega.dim(), eps0);
  const ScalarField phi = solve_ma(omega, f, 0.0, nullptr, opts).phi;
  StabilityLadder ladder{{}, 0.0};
  for (const auto& g : perturbed) {
    const ScalarField psi = solve_ma(omega, g, 0.0, nullptr, opts).phi;
    ladder.rows.push_back({l1_distance(phi, psi), sup_distance(phi, psi), 0.0});
  }
  const auto& first = ladder.rows.front();
  if (!(first.l1_dist > 0.0 && first.l1_dist < 1.0))
    throw Error(ErrorCode::InvalidArgument, "coarsest rung must have 0 < l1 distance < 1");
  ladder.fitted_constant = std::pow(first.linf_dist / 2.0, 1.0 / a0) * std::log(1.0 / first.l1_dist);
  for (auto& row : ladder.rows)
    row.bound = row.l1_dist > 0.0
                    ? 2.0 * std::pow(ladder.fitted_constant, a0) * std::pow(std::log(1.0 / row.l1_dist), -a0)
                    : 0.0;
  return ladder;
}

}  // namespace cmat
