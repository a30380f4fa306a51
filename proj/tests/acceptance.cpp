// One PASS/FAIL line per acceptance criterion; nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

#include "cmat/capacity.hpp"
#include "cmat/commands.hpp"
#include "cmat/csv.hpp"
#include "cmat/degenerate.hpp"
#include "cmat/error.hpp"
#include "cmat/ma_core.hpp"
#include "cmat/orlicz.hpp"
#include "cmat/random.hpp"
#include "cmat/solver.hpp"
#include "cmat/spectral.hpp"

using namespace cmat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::string only;  // optional substring filter on criterion names

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs a criterion, turning an unexpected library error into a failure line.
void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  if (!only.empty() && name.find(only) == std::string::npos) return;
  try {
    auto [pass, detail] = body();
    report(name, pass, detail);
  } catch (const std::exception& e) {
    report(name, false, std::string("error: ") + e.what());
  }
}

std::string fmt(const char* pattern, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string config_path(const std::string& name) { return std::string(CMAT_CONFIG_DIR) + "/" + name; }

// Runs a bundled configuration through the command layer and reads its CSV back.
CsvTable run_bundled(const std::string& name, const fs::path& scratch) {
  RunConfig cfg = parse_config(read_text(config_path(name)));
  const std::string out = (scratch / (name + ".csv")).string();
  cfg.set("output.csv", out);
  cfg.force = true;
  std::ostringstream sink;
  run(cfg, sink);
  return read_csv(out);
}

ScalarField manufactured_density(const HermitianFormField& omega, const ScalarField& target, double lambda) {
  const int n = omega.dim();
  const HermitianFormField g = omega + spectral_dd_bar(target);
  ScalarField f(omega.grid());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = determinant(g[i], n) / determinant(omega[i], n) * std::exp(-lambda * target[i]);
  return f;
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

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) only = argv[1];
  const fs::path scratch = fs::temp_directory_path() / ("cmat_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);
  const SeedSequence root(20240601);

  criterion("manufactured solutions (n=2, 32^4, 10 targets, lambda in {0,1})", [&] {
    TorusGrid g(2, 32);
    HermitianFormField omega(g, HermitianMatrix{1.0, 1.4, Complex(0.2, 0.1)});
    double worst = 0.0, slowest = 0.0;
    for (int t = 0; t < 10; ++t) {
      auto rng = root.child("manufactured").child(static_cast<std::uint64_t>(t)).engine();
      const ScalarField target = random_cone_potential(omega, rng, 4, 0.7);
      for (double lambda : {0.0, 1.0}) {
        const auto t0 = Clock::now();
        const auto r = solve_ma(omega, manufactured_density(omega, target, lambda), lambda);
        slowest = std::max(slowest, seconds_since(t0));
        const ScalarField expected = lambda == 0.0 ? target - target.max() : target;
        worst = std::max(worst, sup_distance(r.phi, expected));
      }
    }
    return std::make_pair(worst <= 1e-8 && slowest <= 60.0,
                          fmt("max sup error %.3e (<= 1e-8), slowest solve %.1f s (<= 60 s)", worst, slowest));
  });

  criterion("trivial fixed points (f = 1, lambda in {0,1}, n in {1,2})", [&] {
    double worst = 0.0;
    for (int n : {1, 2}) {
      TorusGrid g(n, n == 1 ? 64 : 16);
      HermitianFormField omega(g, HermitianMatrix{1.3, 0.8, Complex(0.1, -0.2)});
      for (double lambda : {0.0, 1.0}) {
        const auto r = solve_ma(omega, ScalarField(g, 1.0), lambda);
        worst = std::max({worst, std::abs(r.phi.max()), std::abs(r.phi.min())});
      }
    }
    return std::make_pair(worst <= 1e-10, fmt("max |phi| %.3e (<= 1e-10)", worst));
  });

  criterion("Yau iteration (5 random h, 32^4, lambda = 1)", [&] {
    TorusGrid g(2, 32);
    HermitianFormField omega(g, HermitianMatrix::identity());
    double violation = 0.0, limit_error = 0.0;
    int iterations = 0;
    for (int t = 0; t < 5; ++t) {
      auto rng = root.child("yau").child(static_cast<std::uint64_t>(t)).engine();
      const ScalarField h = random_smooth_field(g, rng, 2, 1.0);
      const auto start = yau_initial_pair(omega, h);
      YauOptions o;
      o.chain_tol = 1e-8;
      const auto r = yau_iteration(omega, start.h, 1.0, start.upper, start.lower, o);
      violation = std::max(violation, r.max_violation);
      iterations = std::max(iterations, static_cast<int>(r.gaps.size()));
      const ScalarField eh = start.h.map([](double v) { return std::exp(v); });
      limit_error = std::max(limit_error, sup_distance(r.limit, solve_ma(omega, eh, 1.0).phi));
    }
    return std::make_pair(violation <= 1e-8 && limit_error <= 1e-7,
                          fmt("worst chain excess %.3e (<= 1e-8), limit vs direct solve %.3e (<= 1e-7), "
                              "up to %.0f iterates",
                              violation, limit_error, iterations));
  });

  criterion("mass conservation (100 cone-interior potentials)", [&] {
    TorusGrid g(2, 16);
    auto omega = std::make_shared<const HermitianFormField>(g, HermitianMatrix{1.2, 0.9, Complex(0.3, -0.1)});
    const double mass = class_mass(*omega);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      auto rng = root.child("mass").child(static_cast<std::uint64_t>(t)).engine();
      const PotentialInClass p(omega, random_cone_potential(*omega, rng, 1 + t % 4, 0.5 + 0.45 * (t % 10) / 9.0));
      worst = std::max(worst, std::abs(class_mass(p.form()) - mass));
    }
    return std::make_pair(worst <= 1e-10, fmt("max mass defect %.3e (<= 1e-10)", worst));
  });

  criterion("comparison principle (20 pairs)", [&] {
    TorusGrid g(2, 16);
    auto omega = std::make_shared<const HermitianFormField>(g, HermitianMatrix::identity());
    double worst = HUGE_VAL;
    for (int t = 0; t < 20; ++t) {
      auto rng = root.child("comparison").child(static_cast<std::uint64_t>(t)).engine();
      const PotentialInClass a(omega, random_cone_potential(*omega, rng, 3, 0.9));
      const PotentialInClass b(omega, random_cone_potential(*omega, rng, 3, 0.9));
      worst = std::min(worst, comparison_check(a, b).margin);
    }
    return std::make_pair(worst >= -1e-8, fmt("min margin %.3e (>= -1e-8)", worst));
  });

  criterion("Kolodziej lemma (10^4 profiles passing the hypothesis)", [&] {
    const auto t0 = Clock::now();
    auto rng = root.child("kolodziej").engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int accepted = 0, drawn = 0;
    double worst = HUGE_VAL;
    while (accepted < 10000 && drawn < 1000000) {
      ++drawn;
      const auto v = random_step_profile(rng);
      const double b = 0.5 + 20.0 * u(rng), delta = 0.1 + 2.0 * u(rng);
      const double s = -1.0 + 0.999 * u(rng), d = -s * u(rng);
      try {
        const auto verdict = kolodziej_bound(v, b, delta, s, d);
        ++accepted;
        if (verdict.applicable) worst = std::min(worst, verdict.margin);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::HypothesisFailed) throw;
      }
    }
    const double elapsed = seconds_since(t0);
    return std::make_pair(accepted == 10000 && worst >= 0.0 && elapsed <= 10.0,
                          fmt("%.0f accepted of %.0f drawn, min margin %.4g (>= 0), %.2f s (<= 10 s)", accepted,
                              drawn, worst, elapsed));
  });

  criterion("Orlicz closed form and Holder inequality", [&] {
    double closed = 0.0;
    for (double beta : {1.0, 2.0, 3.0})
      for (double vol : {0.5, 1.0, 2.0})
        closed = std::max(closed, std::abs(exp_norm_of_one(beta, vol) - std::pow(std::log(1.0 + 1.0 / vol), -beta)));
    TorusGrid g(1, 64);
    double holder = HUGE_VAL;
    for (int t = 0; t < 200; ++t) {
      auto rng = root.child("holder").child(static_cast<std::uint64_t>(t)).engine();
      const auto r = holder_orlicz(random_smooth_field(g, rng, 3, 0.5 + t % 5), random_smooth_field(g, rng, 3, 0.5 + t % 3),
                                   1);
      holder = std::min(holder, r.rhs - r.lhs);
    }
    return std::make_pair(closed <= 1e-10 && holder >= 0.0,
                          fmt("closed-form error %.3e (<= 1e-10), min Holder slack %.4g (>= 0) over 200 pairs",
                              closed, holder));
  });

  criterion("continuation for the bundled zero/pole densities (16^4)", [&] {
    bool pass = true;
    std::string detail;
    for (const char* name : {"continuation_zero.cfg", "continuation_zero_pole.cfg", "continuation_curve.cfg"}) {
      const CsvTable t = run_bundled(name, scratch);
      const std::size_t rows = t.rows.size();
      const double c_floor = t.number(rows - 1, "c_eps_or_K");
      double lo = HUGE_VAL, hi = 0.0;
      bool decreasing = true;
      for (std::size_t k = 0; k < rows; ++k) {
        lo = std::min(lo, t.number(k, "oscillation"));
        hi = std::max(hi, t.number(k, "oscillation"));
        if (k >= 2) decreasing = decreasing && t.number(k, "warm_dist") < t.number(k - 1, "warm_dist");
      }
      const bool ok = std::abs(c_floor) < 1e-3 && hi / lo <= 2.0 && decreasing;
      pass = pass && ok;
      detail += std::string(name) + fmt(": |c| %.2e, osc ratio %.3f, warm distances ", std::abs(c_floor), hi / lo) +
                (decreasing ? "decreasing" : "NOT decreasing") + (ok ? "" : " [fail]") + "; ";
    }
    return std::make_pair(pass, detail + "(|c| < 1e-3, ratio <= 2)");
  });

  criterion("L^p convergence of regularized densities", [&] {
    RunConfig cfg = parse_config(read_text(config_path("continuation_zero_pole.cfg")));
    TorusGrid g(static_cast<int>(cfg.integer("grid.dim", 2)), static_cast<int>(cfg.integer("grid.resolution")));
    Density spec;
    spec.zeros = parse_factors(g, cfg.text("density.zeros"));
    spec.poles = parse_factors(g, cfg.text("density.poles"));
    const auto check = lp_convergence_check(g, spec, 1.2, default_eps_schedule());
    std::string witness;
    for (double w : check.witness) witness += fmt("%.3g ", w);
    return std::make_pair(check.decreasing, fmt("A = %.3g, distances %.3e -> %.3e %s; ", check.a,
                                                check.distances.front(), check.distances.back()) +
                                                (check.decreasing ? "monotone" : "NOT monotone") +
                                                "; A/4 witness (recorded only): " + witness);
  });

  criterion("Tian family on T^2 x T^2 (32^4)", [&] {
    const auto t0 = Clock::now();
    const CsvTable t = run_bundled("tian.cfg", scratch);
    const double elapsed = seconds_since(t0);
    const std::size_t rows = t.rows.size();
    double worst_ratio = 0.0;
    std::string oscs;
    for (std::size_t k = 0; k < rows; ++k) {
      oscs += fmt("%.4g ", t.number(k, "oscillation"));
      if (k > 0) worst_ratio = std::max(worst_ratio, t.number(k, "oscillation") / t.number(k - 1, "oscillation"));
    }
    double lo = HUGE_VAL, hi = 0.0;
    for (std::size_t k = rows - 3; k < rows; ++k) {
      lo = std::min(lo, t.number(k, "oscillation"));
      hi = std::max(hi, t.number(k, "oscillation"));
    }
    const double spread = (hi - lo) / lo;
    return std::make_pair(worst_ratio <= 1.5 && spread <= 0.1 && elapsed <= 600.0,
                          "osc " + oscs + fmt("; max successive ratio %.4f (<= 1.5), last-three spread %.2f%% (<= 10%%), "
                                              "%.0f s (<= 600 s)",
                                              worst_ratio, 100.0 * spread, elapsed));
  });

  criterion("stability ladder (delta in {0.2, 0.1, 0.05})", [&] {
    TorusGrid g(2, 16);
    HermitianFormField omega(g, HermitianMatrix::identity());
    const ScalarField f = ScalarField::from_function(
        g, [](const Point& p) { return 1.0 + 0.5 * std::cos(2 * M_PI * p[0]) * std::cos(2 * M_PI * p[2]); });
    const ScalarField bump =
        ScalarField::from_function(g, [](const Point& p) { return std::sin(2 * M_PI * (p[1] + p[3])); });
    std::vector<ScalarField> ladder;
    for (double d : {0.2, 0.1, 0.05}) ladder.push_back(f + d * bump);
    const auto r = stability_ladder(omega, f, ladder, 1.0);
    bool ok = true;
    std::string rungs;
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      rungs += fmt("[linf %.3e bound %.3e] ", r.rows[k].linf_dist, r.rows[k].bound);
      if (k > 0) ok = ok && r.rows[k].linf_dist <= 1.1 * r.rows[k - 1].linf_dist && r.rows[k].bound >= r.rows[k].linf_dist;
    }
    return std::make_pair(ok, rungs + fmt("exponent %.4f", stability_exponent(2, 1.0)));
  });

  criterion("capacity (whole space, monotonicity, exhaustion, volume-capacity bound)", [&] {
    TorusGrid g(2, 8);
    HermitianFormField gamma(g, HermitianMatrix{1.0, 1.5, Complex(0.2, -0.1)});
    const TestFamily family = bundled_family(gamma, root.child("family"));
    const bool whole = capacity_estimate(gamma, Mask(g, 1.0), family) == 1.0;
    auto rng = root.child("masks").engine();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool monotone = true;
    for (int t = 0; t < 50; ++t) {
      Mask small(g), large(g);
      const double p = u(rng);
      for (std::size_t i = 0; i < g.size(); ++i) {
        small[i] = u(rng) < p ? 1.0 : 0.0;
        large[i] = small[i] == 1.0 || u(rng) < 0.3 ? 1.0 : 0.0;
      }
      monotone = monotone && capacity_estimate(gamma, small, family) <= capacity_estimate(gamma, large, family);
      // exhaustion of `large` by slabs
      double prev = 0.0;
      for (int j = 0; j <= g.resolution(); ++j) {
        Mask ej(g);
        for (std::size_t i = 0; i < g.size(); ++i) ej[i] = large[i] == 1.0 && g.multi_index(i)[0] < j ? 1.0 : 0.0;
        const double c = capacity_estimate(gamma, ej, family);
        monotone = monotone && c >= prev;
        prev = c;
      }
      monotone = monotone && std::abs(prev - capacity_estimate(gamma, large, family)) <= 1e-12;
    }

    // volume against capacity on sublevel sets in one variable
    TorusGrid line(1, 64);
    HermitianFormField flat(line, HermitianMatrix::identity());
    const ScalarField vol(line, 1.0);
    TestFamily fam = bundled_family(flat, root.child("family1"));
    std::vector<ScalarField> samples;
    std::vector<Mask> sets;
    for (int k = 0; k < 3; ++k) {
      auto r = root.child("sublevel").child(static_cast<std::uint64_t>(k)).engine();
      ScalarField psi = random_cone_potential(flat, r, 3, 0.95);
      psi -= psi.max();
      samples.push_back(psi);
      for (double fraction : {0.3, 0.5, 0.7}) {
        Mask e(line);
        for (std::size_t i = 0; i < line.size(); ++i) e[i] = psi[i] < -fraction * oscillation(psi) ? 1.0 : 0.0;
        const ExtremalResult env = extremal_function(flat, e);
        fam.add(env);
        samples.push_back(env.psi - env.sup);
        sets.push_back(e);
      }
    }
    for (const auto& m : fam.members()) samples.push_back(m.potential - m.potential.max());
    const IntegralBounds ib = integral_bounds_estimate(vol, samples);
    double margin = HUGE_VAL;
    for (const auto& e : sets) margin = std::min(margin, volume_capacity_check(flat, vol, e, ib.alpha, ib.c, fam).margin);
    return std::make_pair(whole && monotone && margin >= 0.0,
                          std::string("Cap(X) ") + (whole ? "== 1" : "!= 1") + ", monotone/exhaustion " +
                              (monotone ? "hold" : "FAIL") +
                              fmt(" on 50 pairs, min volume-capacity margin %.4g over 9 sets (alpha %.4g, C %.4g)",
                                  margin, ib.alpha, ib.c));
  });

  criterion("extremal function of the bundled disk", [&] {
    TorusGrid g(1, 64);
    HermitianFormField gamma(g, HermitianMatrix::identity());
    const Mask k = disk(g, 0.2);
    const ExtremalResult r = extremal_function(gamma, k);
    double on_k = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (k[i] == 1.0) on_k = std::max(on_k, std::abs(r.psi[i]));
    const double band = mass_near(r, k);
    return std::make_pair(on_k <= 1e-6 && band >= 0.99,
                          fmt("max |Psi| on K %.3e (<= 1e-6), mass in closure band %.8f (>= 0.99), %.0f sweeps", on_k,
                              band, r.sweeps));
  });

  fs::remove_all(scratch);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
