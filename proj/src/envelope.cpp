#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "cmat/capacity.hpp"
#include "cmat/error.hpp"

namespace cmat {

namespace {

using Offset = std::array<int, 4>;

Offset rotate(const Offset& v) { return {-v[1], v[0], -v[3], v[2]}; }
Offset negate(const Offset& v) { return {-v[0], -v[1], -v[2], -v[3]}; }

// One representative per complex line {+-v, +-Jv} with v in {-1,0,1}^{2n}.
std::vector<Offset> complex_lines(int n) {
  if (n == 1) return {{1, 0, 0, 0}};
  std::vector<Offset> out;
  std::set<Offset> seen;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          const Offset v{a, b, c, d};
          if (v == Offset{0, 0, 0, 0} || seen.count(v)) continue;
          const Offset jv = rotate(v);
          for (const Offset& w : {v, negate(v), jv, negate(jv)}) seen.insert(w);
          out.push_back(v);
        }
  return out;
}

std::size_t shifted(const TorusGrid& g, std::size_t i, const Offset& v) {
  auto m = g.multi_index(i);
  const int res = g.resolution();
  for (int a = 0; a < g.real_dim(); ++a) m[a] = ((m[a] + v[a]) % res + res) % res;
  return g.index(m);
}

Offset axis(int a, int sign) {
  Offset o{0, 0, 0, 0};
  o[a] = sign;
  return o;
}

// Second differences: d_aa from the three-point stencil, d_ab from the four diagonal points.
double second_difference(const ScalarField& u, std::size_t i, int a, int b) {
  const TorusGrid& g = u.grid();
  const double h2 = g.spacing() * g.spacing();
  if (a == b) return (u[shifted(g, i, axis(a, 1))] + u[shifted(g, i, axis(a, -1))] - 2.0 * u[i]) / h2;
  auto diag = [&](int sa, int sb) {
    Offset o{0, 0, 0, 0};
    o[a] = sa;
    o[b] = sb;
    return u[shifted(g, i, o)];
  };
  return (diag(1, 1) - diag(1, -1) - diag(-1, 1) + diag(-1, -1)) / (4.0 * h2);
}

HermitianMatrix stencil_hessian(const ScalarField& u, std::size_t i, int n) {
  HermitianMatrix m{};
  m.a11 = 0.25 * (second_difference(u, i, 0, 0) + second_difference(u, i, 1, 1));
  if (n == 2) {
    m.a22 = 0.25 * (second_difference(u, i, 2, 2) + second_difference(u, i, 3, 3));
    m.a12 = 0.25 * Complex(second_difference(u, i, 0, 2) + second_difference(u, i, 1, 3),
                           second_difference(u, i, 0, 3) - second_difference(u, i, 1, 2));
  }
  return m;
}

}  // namespace

ExtremalResult extremal_function(const HermitianFormField& gamma, const Mask& k, const ExtremalOptions& opts) {
  const TorusGrid& g = gamma.grid();
  require_same_grid(k.grid(), g);
  if (opts.max_sweeps < 1 || !(opts.tol > 0.0)) throw Error(ErrorCode::BadValue, "invalid sweep options");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] != 0.0 && k[i] != 1.0) throw Error(ErrorCode::BadValue, "mask entries must be 0 or 1");
    if (k[i] == 1.0) ++inside;
  }
  if (inside == 0) throw Error(ErrorCode::NonMassiveSet, "K carries no volume, so its extremal function is unbounded");

  const int n = g.complex_dim();
  const double h2 = g.spacing() * g.spacing();
  const auto lines = complex_lines(n);
  const std::size_t nl = lines.size();
  // per point and line: the four neighbours and h^2 gamma(xi, xi)
  std::vector<std::size_t> nb(g.size() * nl * 4);
  std::vector<double> lift(g.size() * nl);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t l = 0; l < nl; ++l) {
      const Offset& v = lines[l];
      const Offset jv = rotate(v);
      std::size_t* p = &nb[(i * nl + l) * 4];
      p[0] = shifted(g, i, v);
      p[1] = shifted(g, i, negate(v));
      p[2] = shifted(g, i, jv);
      p[3] = shifted(g, i, negate(jv));
      // the direction is xi_j = v_xj + i v_yj; quadratic_form conjugates its first slot
      const std::array<Complex, 2> u{Complex(v[0], -v[1]), Complex(v[2], -v[3])};
      lift[i * nl + l] = h2 * quadratic_form(gamma[i], u, n);
    }
  }

  ScalarField psi(g);
  int sweep = 0;
  for (;;) {
    if (sweep >= opts.max_sweeps)
      throw Error(ErrorCode::SweepStalled, "envelope sweep did not settle within " + std::to_string(opts.max_sweeps) +
                                               " sweeps");
    ++sweep;
    double change = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (k[i] == 1.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < nl; ++l) {
        const std::size_t* p = &nb[(i * nl + l) * 4];
        best = std::min(best, 0.25 * (psi[p[0]] + psi[p[1]] + psi[p[2]] + psi[p[3]]) + lift[i * nl + l]);
      }
      change = std::max(change, best - psi[i]);
      psi[i] = best;
    }
    if (change <= opts.tol) break;
  }

  HermitianFormField form(g);
  ScalarField density(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    form[i] = gamma[i] + stencil_hessian(psi, i, n);
    density[i] = std::max(0.0, determinant(form[i], n));
  }
  const double sup = psi.max();
  return {std::move(psi), std::move(form), std::move(density), sweep, sup};
}

double mass_near(const ExtremalResult& r, const Mask& k) {
  const TorusGrid& g = r.psi.grid();
  require_same_grid(k.grid(), g);
  const int dims = g.real_dim();
  int neighbourhood = 1;
  for (int a = 0; a < dims; ++a) neighbourhood *= 3;
  double near = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    total += r.density[i];
    bool hit = false;
    for (int c = 0; c < neighbourhood && !hit; ++c) {
      Offset o{0, 0, 0, 0};
      int rest = c;
      for (int a = 0; a < dims; ++a) {
        o[a] = rest % 3 - 1;
        rest /= 3;
      }
      hit = k[shifted(g, i, o)] == 1.0;
    }
    if (hit) near += r.density[i];
  }
  return total > 0.0 ? near / total : 0.0;
}

}  // namespace cmat
