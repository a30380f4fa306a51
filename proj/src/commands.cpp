#include "cmat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmat/capacity.hpp"
#include "cmat/csv.hpp"
#include "cmat/field_io.hpp"
#include "cmat/ma_core.hpp"
#include "cmat/orlicz.hpp"
#include "cmat/random.hpp"
#include "cmat/solver.hpp"
#include "cmat/spectral.hpp"

namespace cmat {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

TorusGrid grid_from(const RunConfig& cfg, int default_resolution = 0) {
  const int dim = static_cast<int>(cfg.integer("grid.dim", 2));
  const long res = default_resolution > 0 ? cfg.integer("grid.resolution", default_resolution)
                                          : cfg.integer("grid.resolution");
  if (res % 2 != 0) throw Error(ErrorCode::BadValue, "'grid.resolution' must be even");
  return TorusGrid(dim, static_cast<int>(res));
}

HermitianFormField form_from(const RunConfig& cfg, const std::string& section, const TorusGrid& grid) {
  HermitianFormField form(grid);
  if (cfg.has(section + ".file")) {
    form = read_form_field(cfg.text(section + ".file"));
    if (!(form.grid() == grid))
      throw Error(ErrorCode::GridMismatch, "form file '" + cfg.text(section + ".file") + "' is on a different grid");
  } else {
    HermitianMatrix m{cfg.number(section + ".a11", 1.0), cfg.number(section + ".a22", 1.0),
                      Complex(cfg.number(section + ".re12", 0.0), cfg.number(section + ".im12", 0.0))};
    if (grid.complex_dim() == 1) m = HermitianMatrix{m.a11, 0.0, {}};
    form = HermitianFormField(grid, m);
  }
  if (!(form.min_eigenvalue_overall() > 0.0))
    throw Error(ErrorCode::BadValue, "'" + section + "' must be positive definite");
  return form;
}

ScalarField cosine_density(const TorusGrid& grid, double scale, double amplitude) {
  if (!(std::abs(amplitude) < 1.0)) throw Error(ErrorCode::BadValue, "cosine amplitude must lie in (-1, 1)");
  return ScalarField::from_function(
      grid, [&](const Point& p) { return scale * (1.0 + amplitude * std::cos(2.0 * M_PI * p[0])); });
}

SolveOptions solver_options(const RunConfig& cfg) {
  SolveOptions o;
  o.max_newton_iters = static_cast<int>(cfg.integer("solver.max_newton_iters", o.max_newton_iters));
  o.residual_tol = cfg.number("solver.residual_tol", o.residual_tol);
  if (cfg.text("solver.linear_solver", "gmres") == "cg") o.linear_solver = LinearSolver::ConjugateGradient;
  return o;
}

Mask disk_mask(const TorusGrid& grid, double radius) {
  Mask k(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.real_dim(); ++a) r2 += (p[a] - 0.5) * (p[a] - 0.5);
    k[i] = r2 < radius * radius ? 1.0 : 0.0;
  }
  return k;
}

std::vector<CsvRow> path_rows(const std::vector<PathRow>& rows) {
  std::vector<CsvRow> out;
  for (const auto& r : rows)
    out.push_back({r.eps_or_t, r.c_eps_or_k, r.oscillation, r.sup_laplacian, r.residual, r.warm_dist});
  return out;
}

const std::vector<std::string> kPathHeader{"eps_or_t", "c_eps_or_K", "oscillation", "sup_laplacian", "residual",
                                           "warm_dist"};

void run_solve(const RunConfig& cfg, std::ostream& out) {
  const TorusGrid grid = grid_from(cfg);
  const HermitianFormField omega = form_from(cfg, "form", grid);
  ScalarField f = cfg.has("density.file")
                      ? read_scalar_field(cfg.text("density.file"))
                      : cosine_density(grid, cfg.number("density.constant", 1.0),
                                       cfg.number("density.cosine_amplitude", 0.0));
  if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, "density file is on a different grid");
  SolveOptions opts = solver_options(cfg);
  opts.rescale_mass = cfg.flag("equation.rescale_mass", true);
  const double lambda = cfg.number("equation.lambda", 0.0);
  const SolveResult r = solve_ma(omega, f, lambda, nullptr, opts);
  if (cfg.has("output.potential")) write_field(cfg.text("output.potential"), r.phi);
  if (cfg.has("output.report")) {
    std::vector<CsvRow> rows;
    const auto& rh = r.report.residual_history;
    const auto& mh = r.report.mass_history;
    for (std::size_t k = 0; k < std::min(rh.size(), mh.size()); ++k)
      rows.push_back({static_cast<double>(k), rh[k], mh[k]});
    write_csv(rows, {"iteration", "residual", "mass"}, cfg.text("output.report"));
  }
  out << "solve: iterations=" << r.report.iterations
      << " residual=" << fmt("%.3e", r.report.residual_history.empty() ? 0.0 : r.report.residual_history.back())
      << " oscillation=" << format_number(r.report.oscillation)
      << " normalizing_constant=" << format_number(r.report.normalizing_constant) << "\n";
}

void run_continuation(const RunConfig& cfg, std::ostream& out) {
  const TorusGrid grid = grid_from(cfg);
  const HermitianFormField omega = form_from(cfg, "form", grid);
  const HermitianFormField alpha = form_from(cfg, "alpha", grid);
  Density spec;
  if (cfg.has("density.zeros")) spec.zeros = parse_factors(grid, cfg.text("density.zeros"));
  if (cfg.has("density.poles")) spec.poles = parse_factors(grid, cfg.text("density.poles"));
  if (cfg.has("density.a")) spec.a = cfg.number("density.a");
  const ScalarField volume = omega.determinant();
  if (cfg.flag("density.match_mass", true)) match_mass(spec, omega, volume);
  const std::vector<double> schedule =
      cfg.has("schedule.eps") ? cfg.numbers("schedule.eps")
                              : default_eps_schedule(cfg.number("schedule.start", 1e-1),
                                                     cfg.number("schedule.floor", 1e-5));
  const auto r = continuation_path(omega, alpha, spec, cfg.number("equation.lambda", 0.0), schedule, volume,
                                   solver_options(cfg));
  if (cfg.has("output.csv")) write_csv(path_rows(r.rows), kPathHeader, cfg.text("output.csv"));
  double lo = HUGE_VAL, hi = 0.0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.oscillation);
    hi = std::max(hi, row.oscillation);
  }
  out << "continuation: steps=" << r.rows.size() << " c_eps_at_floor=" << format_number(r.rows.back().c_eps_or_k)
      << " oscillation_ratio=" << format_number(lo > 0.0 ? hi / lo : 1.0) << "\n";
}

void run_tian(const RunConfig& cfg, std::ostream& out) {
  const TorusGrid grid = grid_from(cfg);
  if (grid.complex_dim() != 2) throw Error(ErrorCode::BadValue, "the Tian scenario needs 'grid.dim' = 2");
  const HermitianFormField omega_x(grid, HermitianMatrix::identity());
  const ScalarField f = cosine_density(grid, 1.0, cfg.number("tian.cosine_amplitude", 0.5));
  const std::vector<double> ts =
      cfg.has("tian.t") ? cfg.numbers("tian.t") : std::vector<double>{1.0, 0.3, 0.1, 0.03, 0.01};
  const auto r = tian_family_run(cfg.number("tian.base_coefficient", 1.0), omega_x, f, ts, solver_options(cfg));
  if (cfg.has("output.csv")) write_csv(path_rows(r.rows), kPathHeader, cfg.text("output.csv"));
  out << "tian-family: steps=" << r.rows.size()
      << " oscillation_at_smallest_t=" << format_number(r.rows.back().oscillation) << "\n";
}

void run_capacity(const RunConfig& cfg, std::ostream& out) {
  HermitianFormField gamma = cfg.has("input.gamma") ? read_form_field(cfg.text("input.gamma"))
                                                    : form_from(cfg, "form", grid_from(cfg));
  const TorusGrid grid = gamma.grid();
  if (!(gamma.min_eigenvalue_overall() > 0.0)) throw Error(ErrorCode::BadValue, "gamma must be positive definite");
  auto shared = std::make_shared<const HermitianFormField>(gamma);
  const Mask k = cfg.has("input.mask") ? read_scalar_field(cfg.text("input.mask"))
                                       : disk_mask(grid, cfg.number("mask.radius", 0.2));
  if (!(k.grid() == grid)) throw Error(ErrorCode::GridMismatch, "mask is on a different grid than gamma");
  const SeedSequence seeds(cfg.seed());

  const std::string kind = cfg.text("family.kind", "bundled");
  TestFamily family(gamma);
  std::vector<ScalarField> samples;
  if (kind == "bundled") {
    family = bundled_family(gamma, seeds.child("family"), static_cast<int>(cfg.integer("family.count", 24)));
    bool nonempty = false;
    for (std::size_t i = 0; i < k.size(); ++i) nonempty = nonempty || k[i] == 1.0;
    if (nonempty) {
      const ExtremalResult env = extremal_function(gamma, k);
      family.add(env);
      samples.push_back(env.psi - env.sup);
    }
  } else {
    if (!fs::is_directory(kind))
      throw Error(ErrorCode::IoError, "family must be 'bundled' or a directory, got '" + kind + "'");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(kind))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) family.add(PotentialInClass(shared, read_scalar_field(p.string())));
  }
  for (const auto& m : family.members()) samples.push_back(m.potential - m.potential.max());

  const ScalarField volume = gamma.determinant();
  const double cap = capacity_estimate(gamma, k, family);
  const IntegralBounds ib = integral_bounds_estimate(volume, samples);
  const VolumeCapacity vc = volume_capacity_check(gamma, volume, k, ib.alpha, ib.c, family);

  if (cfg.has("output.profile")) {
    ScalarField psi(grid);
    if (cfg.has("profile.potential")) {
      psi = read_scalar_field(cfg.text("profile.potential"));
    } else {
      auto rng = seeds.child("profile").engine();
      psi = random_cone_potential(gamma, rng, 3, 0.9);
      psi -= psi.max();
    }
    const PotentialInClass p(shared, psi);
    std::vector<double> levels;
    if (cfg.has("profile.levels")) {
      levels = cfg.numbers("profile.levels");
    } else {
      const double osc = std::max(oscillation(psi), 1e-3);
      for (double fraction : {1.0, 0.75, 0.5, 0.25, 0.1, 0.05}) levels.push_back(-fraction * osc);
    }
    const CapacityProfile prof = sublevel_profile(gamma, p, levels, family);
    std::vector<CsvRow> rows;
    for (std::size_t j = 0; j < prof.s.size(); ++j)
      rows.push_back({prof.s[j], prof.a[j], std::pow(prof.decay_constant / -prof.s[j], 1.0 / grid.complex_dim())});
    write_csv(rows, {"s", "a", "decay_bound"}, cfg.text("output.profile"));
  }
  out << "capacity: cap=" << format_number(cap) << " vol=" << format_number(vc.vol)
      << " bound=" << format_number(vc.bound) << " alpha=" << format_number(ib.alpha) << " C=" << format_number(ib.c)
      << " members=" << family.size() << "\n";
}

void run_orlicz(const RunConfig& cfg, std::ostream& out) {
  const OrliczGauge gauge = OrliczGauge::parse(cfg.text("orlicz.gauge"));
  const ScalarField f = read_scalar_field(cfg.text("input.field"));
  const double norm = luxemburg_norm(f, gauge);
  const ScalarField mod = f.map([](double v) { return std::abs(v); });
  if (cfg.has("output.report"))
    write_csv({{gauge.name(), norm, integrate(mod), mod.max()}}, {"gauge", "norm", "l1_norm", "sup_norm"},
              cfg.text("output.report"));
  out << "orlicz: gauge=" << gauge.name() << " norm=" << format_number(norm) << "\n";
}

void emit(const RunConfig& cfg, const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
          std::ostream& out) {
  if (cfg.has("output.csv"))
    write_csv(rows, header, cfg.text("output.csv"));
  else
    out << render_csv(header, rows);
}

struct SuiteCheck {
  std::string name;
  double value;
  double threshold;
  bool at_most;  // pass when value <= threshold, else value >= threshold
};

std::vector<SuiteCheck> property_suite(const TorusGrid& grid, int trials, const SeedSequence& seeds) {
  std::vector<SuiteCheck> checks;
  const auto omega = std::make_shared<const HermitianFormField>(grid, HermitianMatrix{1.0, 1.3, Complex(0.2, 0.1)});

  double fixed = 0.0;
  for (double lambda : {0.0, 1.0}) {
    const auto r = solve_ma(*omega, ScalarField(grid, 1.0), lambda);
    fixed = std::max({fixed, std::abs(r.phi.max()), std::abs(r.phi.min())});
  }
  checks.push_back({"fixed_point", fixed, 1e-10, true});

  const double mass = class_mass(*omega);
  double mass_defect = 0.0, comparison = HUGE_VAL;
  for (int t = 0; t < trials; ++t) {
    auto rng = seeds.child("mass").child(static_cast<std::uint64_t>(t)).engine();
    const PotentialInClass p(omega, random_cone_potential(*omega, rng, 3, 0.9));
    mass_defect = std::max(mass_defect, std::abs(class_mass(p.form()) - mass));
    const PotentialInClass q(omega, random_cone_potential(*omega, rng, 3, 0.9));
    comparison = std::min(comparison, comparison_check(p, q).margin);
  }
  checks.push_back({"mass_conservation", mass_defect, 1e-10, true});
  checks.push_back({"comparison_margin", comparison, -1e-8, false});

  double closed = 0.0;
  for (double beta : {1.0, 2.0, 3.0})
    for (double vol : {0.5, 1.0, 2.0})
      closed = std::max(closed, std::abs(exp_norm_of_one(beta, vol) - std::pow(std::log(1.0 + 1.0 / vol), -beta)));
  checks.push_back({"orlicz_closed_form", closed, 1e-10, true});

  double holder = HUGE_VAL;
  for (int t = 0; t < trials; ++t) {
    auto rng = seeds.child("holder").child(static_cast<std::uint64_t>(t)).engine();
    const auto r = holder_orlicz(random_smooth_field(grid, rng, 3, 1.0 + t % 4),
                                 random_smooth_field(grid, rng, 3, 0.5 + t % 3), 1);
    holder = std::min(holder, r.rhs - r.lhs);
  }
  checks.push_back({"holder_margin", holder, 0.0, false});

  double kolodziej = HUGE_VAL;
  auto krng = seeds.child("kolodziej").engine();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50 * trials; ++t) {
    const auto v = random_step_profile(krng);
    const double b = 0.5 + 20.0 * u(krng), delta = 0.1 + 2.0 * u(krng);
    const double s = -1.0 + 0.999 * u(krng), d = -s * u(krng);
    try {
      kolodziej = std::min(kolodziej, kolodziej_bound(v, b, delta, s, d).margin);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisFailed) throw;
    }
  }
  checks.push_back({"kolodziej_margin", kolodziej, 0.0, false});

  const TestFamily family = bundled_family(*omega, seeds.child("family"));
  checks.push_back({"capacity_whole_space", capacity_estimate(*omega, Mask(grid, 1.0), family), 1.0, false});
  double monotone = HUGE_VAL;
  auto mrng = seeds.child("masks").engine();
  for (int t = 0; t < trials; ++t) {
    Mask small(grid), large(grid);
    const double p = u(mrng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      small[i] = u(mrng) < p ? 1.0 : 0.0;
      large[i] = small[i] == 1.0 || u(mrng) < 0.3 ? 1.0 : 0.0;
    }
    monotone = std::min(monotone, capacity_estimate(*omega, large, family) - capacity_estimate(*omega, small, family));
  }
  checks.push_back({"capacity_monotone", monotone, 0.0, false});

  const TorusGrid plane(1, 64);
  const HermitianFormField flat(plane, HermitianMatrix::identity());
  const Mask k = disk_mask(plane, 0.2);
  const ExtremalResult env = extremal_function(flat, k);
  double on_k = 0.0;
  for (std::size_t i = 0; i < plane.size(); ++i)
    if (k[i] == 1.0) on_k = std::max(on_k, std::abs(env.psi[i]));
  checks.push_back({"extremal_on_set", on_k, 1e-6, true});
  checks.push_back({"extremal_band_mass", mass_near(env, k), 0.99, false});
  return checks;
}

void run_verify(const RunConfig& cfg, std::ostream& out) {
  const TorusGrid grid = grid_from(cfg, 8);
  const int trials = static_cast<int>(cfg.integer("verify.trials", 20));
  const SeedSequence seeds = SeedSequence(cfg.seed()).child(cfg.mode);
  const auto omega = std::make_shared<const HermitianFormField>(grid, HermitianMatrix::identity());
  if (cfg.mode == "comparison") {
    std::vector<CsvRow> rows;
    double worst = HUGE_VAL;
    for (int t = 0; t < trials; ++t) {
      auto rng = seeds.child(static_cast<std::uint64_t>(t)).engine();
      const PotentialInClass a(omega, random_cone_potential(*omega, rng, 3, 0.9));
      const PotentialInClass b(omega, random_cone_potential(*omega, rng, 3, 0.9));
      const auto r = comparison_check(a, b);
      rows.push_back({static_cast<double>(t), r.lhs, r.rhs, r.margin});
      worst = std::min(worst, r.margin);
    }
    emit(cfg, {"trial", "lhs", "rhs", "margin"}, rows, out);
    if (worst < -1e-8)
      throw Error(ErrorCode::HypothesisFailed, "comparison margin " + format_number(worst) + " below -1e-8");
  } else if (cfg.mode == "monotone") {
    auto rng = seeds.engine();
    const PotentialInClass phi(omega, random_cone_potential(*omega, rng, 3, 0.7));
    const std::vector<double> schedule =
        cfg.has("verify.eps") ? cfg.numbers("verify.eps") : std::vector<double>{0.2, 0.1, 0.05, 0.025};
    std::vector<CsvRow> rows;
    for (const auto& r : monotone_convergence_probe(phi, schedule))
      rows.push_back({r.eps, r.pairing, r.gap, r.measure_pairing, r.measure_gap});
    emit(cfg, {"eps", "pairing", "gap", "measure_pairing", "measure_gap"}, rows, out);
  } else {
    const auto checks = property_suite(grid, trials, seeds);
    std::vector<CsvRow> rows;
    int failed = 0;
    for (const auto& c : checks) {
      const bool pass = c.at_most ? c.value <= c.threshold : c.value >= c.threshold;
      failed += pass ? 0 : 1;
      rows.push_back({c.name, pass ? 1.0 : 0.0, c.value, c.threshold});
    }
    emit(cfg, {"check", "passed", "value", "threshold"}, rows, out);
    if (failed > 0) throw Error(ErrorCode::HypothesisFailed, std::to_string(failed) + " suite checks failed");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw Error(ErrorCode::BadValue, what + " needs an integer, got '" + s + "'");
  return static_cast<int>(v);
}

Point factor_center(const TorusGrid& grid, const std::vector<std::string>& args) {
  if (static_cast<int>(args.size()) != grid.real_dim())
    throw Error(ErrorCode::BadValue, "point(...) needs " + std::to_string(grid.real_dim()) + " grid indices");
  std::array<int, 4> m{0, 0, 0, 0};
  for (int a = 0; a < grid.real_dim(); ++a) {
    m[a] = parse_int(args[a], "point index");
    if (m[a] < 0 || m[a] >= grid.resolution()) throw Error(ErrorCode::BadValue, "point index out of range");
  }
  return cell_center(grid, grid.index(m));
}

}  // namespace

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingKey:
    case ErrorCode::UnknownKey:
    case ErrorCode::BadValue:
      return 1;
    case ErrorCode::NoConvergence:
      return 2;
    case ErrorCode::ConeExit:
      return 3;
    case ErrorCode::OutputExists:
    case ErrorCode::IoError:
      return 4;
    default:
      return 5;
  }
}

std::vector<DensityFactor> parse_factors(const TorusGrid& grid, const std::string& text) {
  std::vector<DensityFactor> out;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ';')) {
    const auto open = item.find('(');
    const auto close = item.find(')');
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw Error(ErrorCode::BadValue, "density factor '" + item + "' is not of the form kind(args)^exponent");
    std::string kind = item.substr(0, open);
    kind.erase(std::remove_if(kind.begin(), kind.end(), ::isspace), kind.end());
    std::istringstream argstream(item.substr(open + 1, close - open - 1));
    std::vector<std::string> args;
    for (std::string a; argstream >> a;) args.push_back(a);
    double exponent = 1.0;
    std::string tail = item.substr(close + 1);
    tail.erase(std::remove_if(tail.begin(), tail.end(), ::isspace), tail.end());
    if (!tail.empty()) {
      char* end = nullptr;
      if (tail[0] != '^' || (exponent = std::strtod(tail.c_str() + 1, &end), *end != '\0') || !(exponent > 0.0))
        throw Error(ErrorCode::BadValue, "bad exponent in density factor '" + item + "'");
    }
    if (kind == "point") {
      out.push_back(point_zero(grid, factor_center(grid, args), exponent));
    } else if (kind == "curve") {
      if (args.size() != 3 || grid.complex_dim() != 2)
        throw Error(ErrorCode::BadValue, "curve(direction a b) needs three arguments and 'grid.dim' = 2");
      const int dir = parse_int(args[0], "curve direction");
      if (dir != 0 && dir != 1) throw Error(ErrorCode::BadValue, "curve direction must be 0 or 1");
      out.push_back(curve_zero(grid, dir, std::stod(args[1]), std::stod(args[2]), exponent));
    } else {
      throw Error(ErrorCode::BadValue, "unknown density factor kind '" + kind + "'");
    }
  }
  return out;
}

void run(const RunConfig& config, std::ostream& out) {
  for (const auto& [key, entry] : config.entries()) {
    if (key.rfind("output.", 0) != 0) continue;
    if (fs::exists(entry.value) && !config.force)
      throw Error(ErrorCode::OutputExists, "output '" + entry.value + "' exists; pass --force to overwrite");
  }
  set_fft_threads(config.threads());
  const std::string& c = config.command;
  if (c == "solve") run_solve(config, out);
  else if (c == "continuation") run_continuation(config, out);
  else if (c == "tian-family") run_tian(config, out);
  else if (c == "capacity") run_capacity(config, out);
  else if (c == "orlicz") run_orlicz(config, out);
  else if (c == "verify") run_verify(config, out);
  else throw Error(ErrorCode::BadValue, "unknown command '" + c + "'");
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex Monge-Ampere equations on flat tori", "cmat"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string seed, threads;
  bool force = false;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--seed", seed, "seed for every randomized family");
  app.add_flag("--force", force, "overwrite existing outputs");
  app.add_option("--threads", threads, "FFT threads");

  std::map<std::string, std::string> flags;
  auto flag = [&flags](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto* solve = app.add_subcommand("solve", "solve a nondegenerate equation");
  flag(solve, "--out-potential", "output.potential", "potential field file");
  flag(solve, "--report", "output.report", "iteration report CSV");
  auto* cont = app.add_subcommand("continuation", "eps-regularized continuation for a degenerate density");
  flag(cont, "--out", "output.csv", "path CSV");
  auto* tian = app.add_subcommand("tian-family", "degenerating reference forms on a product torus");
  flag(tian, "--out", "output.csv", "path CSV");
  auto* cap = app.add_subcommand("capacity", "capacity of a masked set");
  flag(cap, "--gamma", "input.gamma", "form field file");
  flag(cap, "--mask", "input.mask", "mask field file");
  flag(cap, "--family", "family.kind", "'bundled' or a directory of potentials");
  flag(cap, "--profile", "output.profile", "sublevel profile CSV");
  auto* orl = app.add_subcommand("orlicz", "Luxemburg norm of a field");
  flag(orl, "--gauge", "orlicz.gauge", "power:p, plog:beta or exp:beta");
  flag(orl, "--input", "input.field", "field file");
  flag(orl, "--report", "output.report", "report CSV");
  auto* ver = app.add_subcommand("verify", "randomized property checks");
  std::string mode = "suite";
  ver->add_option("mode", mode, "comparison, monotone or suite")
      ->check(CLI::IsMember({"comparison", "monotone", "suite"}));
  flag(ver, "--out", "output.csv", "result CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: usage: " << msg << "\n";
    return 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::string text;
    if (!config_path.empty()) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) throw Error(ErrorCode::IoError, "cannot read config '" + config_path + "'");
      std::ostringstream s;
      s << f.rdbuf();
      text = s.str();
    }
    RunConfig cfg = parse_config(text, command);
    cfg.mode = command == "verify" ? mode : "";
    cfg.force = force;
    for (const auto& [key, value] : flags) cfg.set(key, value);
    if (!seed.empty()) cfg.set("run.seed", seed);
    if (!threads.empty()) cfg.set("run.threads", threads);
    require_keys(cfg);
    run(cfg, out);
    return 0;
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << error_code_name(e.code()) << ": " << msg << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: internal: " << msg << "\n";
    return 5;
  }
}

}  // namespace cmat
