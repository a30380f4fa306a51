#include "cmat/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>

#include "cmat/error.hpp"

namespace cmat {
namespace {

constexpr double kE = std::numbers::e;

double require_param(double v, const char* what) {
  if (!(v >= 1.0) || !std::isfinite(v))
    throw Error(ErrorCode::BadValue, std::string(what) + " must be a finite number >= 1");
  return v;
}

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi == -INFINITY) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

double log_p_beta(double log_x, double beta) {
  const double x = std::exp(log_x);
  const double l = std::isfinite(x) ? std::log(kE + x) : log_x;
  return log_x + beta * std::log(l);
}

double log_q_beta(double log_y, double beta) {
  const double s = std::exp(log_y / beta);
  if (s > 700.0) return s + std::log1p(-std::exp(-s));
  if (s < 1e-8) return std::log(s) + std::log1p(0.5 * s);
  return std::log(std::expm1(s));
}

double log_ratio(double u, double v, double beta) {
  return u + v - log_add_exp(log_p_beta(u, beta), log_q_beta(v, beta));
}

double maximize_ratio(double beta) {
  constexpr int kGrid = 400;
  constexpr double kLo = -20.0, kHi = 20.0;
  double best = -INFINITY, bu = 0.0, bv = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double u = kLo + (kHi - kLo) * i / (kGrid - 1);
    for (int j = 0; j < kGrid; ++j) {
      const double v = kLo + (kHi - kLo) * j / (kGrid - 1);
      const double r = log_ratio(u, v, beta);
      if (r > best) {
        best = r;
        bu = u;
        bv = v;
      }
    }
  }
  // Pattern search around the best grid point.
  double step = (kHi - kLo) / (kGrid - 1);
  while (step > 1e-12) {
    bool moved = false;
    for (const auto& d : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}) {
      const double u = bu + d.first * step, v = bv + d.second * step;
      const double r = log_ratio(u, v, beta);
      if (r > best) {
        best = r;
        bu = u;
        bv = v;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return std::exp(best);
}

double weighted_gauge_integral(const ScalarField& f, const OrliczGauge& g, const ScalarField& w,
                               double lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (w[i] == 0.0) continue;
    s += g(std::abs(f[i]) / lambda) * w[i];
  }
  return s * f.grid().weight();
}

}  // namespace

OrliczGauge OrliczGauge::power(double p) { return {Kind::Power, require_param(p, "power exponent")}; }
OrliczGauge OrliczGauge::p_beta(double beta) { return {Kind::PBeta, require_param(beta, "beta")}; }
OrliczGauge OrliczGauge::q_beta(double beta) { return {Kind::QBeta, require_param(beta, "beta")}; }

OrliczGauge OrliczGauge::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorCode::BadValue, "gauge must look like power:p, plog:beta or exp:beta");
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') throw Error(ErrorCode::BadValue, "bad gauge parameter '" + value + "'");
  if (kind == "power") return power(v);
  if (kind == "plog") return p_beta(v);
  if (kind == "exp") return q_beta(v);
  throw Error(ErrorCode::BadValue, "unknown gauge kind '" + kind + "'");
}

std::string OrliczGauge::name() const {
  char buf[64];
  const char* k = kind_ == Kind::Power ? "power" : kind_ == Kind::PBeta ? "plog" : "exp";
  std::snprintf(buf, sizeof buf, "%s:%g", k, param_);
  return buf;
}

double OrliczGauge::operator()(double t) const {
  if (t < 0.0 || std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "gauge argument must be >= 0");
  switch (kind_) {
    case Kind::Power: return std::pow(t, param_);
    case Kind::PBeta: return t == 0.0 ? 0.0 : t * std::pow(std::log(kE + t), param_);
    case Kind::QBeta: return std::expm1(std::pow(t, 1.0 / param_));
  }
  return 0.0;
}

double gauge_eval(const OrliczGauge& g, double t) { return g(t); }

double luxemburg_norm(const ScalarField& f, const OrliczGauge& g, const ScalarField& weight) {
  require_same_grid(f.grid(), weight.grid());
  f.require_finite("luxemburg_norm input");
  double total = 0.0;
  for (double w : weight.values()) {
    if (w < 0.0) throw Error(ErrorCode::InvalidArgument, "volume weight must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "volume weight has zero mass");
  bool zero = true;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0 && weight[i] != 0.0) zero = false;
  if (zero) return 0.0;

  auto phi = [&](double lambda) { return weighted_gauge_integral(f, g, weight, lambda); };
  double hi = 1.0;
  while (!(phi(hi) <= 1.0)) {
    hi *= 2.0;
    if (hi > 1e300) throw Error(ErrorCode::NormInfinite, "gauge integral never drops to 1");
  }
  double lo = hi;
  while (phi(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) <= 1.0 ? hi : lo) = mid;
  }
  return hi;
}

double luxemburg_norm(const ScalarField& f, const OrliczGauge& g) {
  return luxemburg_norm(f, g, ScalarField(f.grid(), 1.0));
}

double exp_norm_of_one(double beta, double vol) {
  require_param(beta, "beta");
  if (!(vol > 0.0)) throw Error(ErrorCode::InvalidArgument, "volume must be > 0");
  return 1.0 / std::pow(std::log1p(1.0 / vol), beta);
}

double holder_constant(double beta) {
  require_param(beta, "beta");
  if (beta == 1.0) return 1.0;
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(beta);
  if (it != cache.end()) return it->second;
  const double c = maximize_ratio(beta);
  cache.emplace(beta, c);
  return c;
}

HolderResult holder_orlicz(const ScalarField& f, const ScalarField& g, double beta,
                           const ScalarField& weight) {
  require_same_grid(f.grid(), g.grid());
  const double lhs = std::abs(integrate(f * g, weight));
  const double nf = luxemburg_norm(f, OrliczGauge::p_beta(beta), weight);
  const double ng = luxemburg_norm(g, OrliczGauge::q_beta(beta), weight);
  return {lhs, 2.0 * holder_constant(beta) * nf * ng};
}

HolderResult holder_orlicz(const ScalarField& f, const ScalarField& g, double beta) {
  return holder_orlicz(f, g, beta, ScalarField(f.grid(), 1.0));
}

LlogLBound llogl_upper_bound(const ScalarField& f, double beta, const ScalarField& weight) {
  require_same_grid(f.grid(), weight.grid());
  for (double v : f.values())
    if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "llogl_upper_bound needs f >= 0");
  const double l1 = integrate(f, weight);
  if (!(l1 > 0.0)) throw Error(ErrorCode::ZeroField, "llogl_upper_bound needs f not identically 0");
  const double norm = luxemburg_norm(f, OrliczGauge::p_beta(beta), weight);
  const double bound =
      integrate(f.map([&](double v) { return v * std::pow(std::log(kE + v / l1), beta); }), weight);
  return {norm, bound};
}

LlogLBound llogl_upper_bound(const ScalarField& f, double beta) {
  return llogl_upper_bound(f, beta, ScalarField(f.grid(), 1.0));
}

double i_functional(const ScalarField& f, double class_mass, double eps, int n,
                    const ScalarField& weight) {
  if (!(class_mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "class mass must be > 0");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
  for (double v : f.values())
    if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "i_functional needs f >= 0");
  const double power = n + eps;
  const auto integrand = f.map([&](double v) {
    return v * std::pow(std::log(kE + v / class_mass), power);
  });
  return integrate(integrand, weight) / class_mass;
}

double i_functional(const ScalarField& f, double class_mass, double eps, int n) {
  return i_functional(f, class_mass, eps, n, ScalarField(f.grid(), 1.0));
}

}  // namespace cmat
