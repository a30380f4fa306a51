#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "cmat/commands.hpp"
#include "cmat/csv.hpp"
#include "cmat/field_io.hpp"
#include "doctest.h"

using namespace cmat;
namespace fs = std::filesystem;

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

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cmat_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cmat");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kMinimalSolve = "command = solve\n[grid]\ndim = 2\nresolution = 8\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    auto cfg = parse_config(std::string(kMinimalSolve) + "# comment\n[equation]\nlambda = 1.5  # inline\n");
    CHECK(cfg.command == "solve");
    CHECK(cfg.integer("grid.resolution") == 8);
    CHECK(cfg.number("equation.lambda") == 1.5);
    CHECK(cfg.number("solver.residual_tol", 1e-10) == 1e-10);
    CHECK(cfg.entries().at("equation.lambda").line == 7);

    try {
      parse_config("command = solve\n[grid]\ndim = 2\n");
      FAIL("expected a missing key");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingKey);
      CHECK(std::string(e.what()).find("grid.resolution") != std::string::npos);
    }
    try {
      parse_config(std::string(kMinimalSolve) + "[equation]\nlambda = -1\n");
      FAIL("expected a bad value");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadValue);
      CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
    CHECK(code_of([] { parse_config(std::string(kMinimalSolve) + "[grid2]\nx = 1\n"); }) == ErrorCode::UnknownKey);
    CHECK(code_of([] { parse_config(std::string(kMinimalSolve) + "resolution = 4\n"); }) == ErrorCode::BadValue);
    CHECK(code_of([] { parse_config("[grid]\nresolution = 8\n"); }) == ErrorCode::MissingKey);
    CHECK(code_of([] { parse_config(kMinimalSolve, "capacity"); }) == ErrorCode::BadValue);
    CHECK(code_of([] { parse_config("command = solve\n[grid]\nresolution = eight\n"); }) == ErrorCode::BadValue);
    CHECK(code_of([] { parse_config("command = solve\n[grid]\nresolution = 8\ndim = 3\n"); }) == ErrorCode::BadValue);
    CHECK(code_of([] { parse_config("command = solve\nstray = 1\n"); }) == ErrorCode::UnknownKey);

    auto cont = parse_config("[grid]\nresolution = 8\n[schedule]\neps = 1e-1, 1e-2 1e-3\n", "continuation");
    CHECK(cont.numbers("schedule.eps") == std::vector<double>{1e-1, 1e-2, 1e-3});
    CHECK(code_of([&] { cont.set("schedule.eps", "1e-1 -1"); }) == ErrorCode::BadValue);
    CHECK(code_of([&] { cont.set("output.nothing", "x"); }) == ErrorCode::UnknownKey);
  }

  TEST_CASE("CSV writing and reading") {
    TempDir dir;
    const std::vector<std::string> header{"a", "b"};
    write_csv({}, header, dir / "empty.csv");
    CHECK(read_text(dir / "empty.csv") == "a,b\n");

    const double x = 0.1 + 0.2, y = -1.0 / 3.0;
    write_csv({{x, y}, {std::string("label"), 1e-300}}, header, dir / "one.csv");
    const std::string text = read_text(dir / "one.csv");
    CHECK(text.back() == '\n');
    const CsvTable t = read_csv(dir / "one.csv");
    CHECK(t.number(0, "a") == x);
    CHECK(t.number(0, "b") == y);
    CHECK(t.rows[1][0] == "label");
    CHECK(t.number(1, "b") == 1e-300);

    CHECK(code_of([&] { write_csv({{1.0}}, header, dir / "bad.csv"); }) == ErrorCode::ArityMismatch);
    CHECK(code_of([&] { write_csv({}, header, (dir.path / "missing" / "x.csv").string()); }) == ErrorCode::IoError);
    CHECK(code_of([&] { t.column("c"); }) == ErrorCode::BadValue);
  }

  TEST_CASE("density factor grammar") {
    TorusGrid g(2, 8);
    auto f = parse_factors(g, "point(1 2 3 4)^2; curve(1 0.5 0.25)");
    REQUIRE(f.size() == 2);
    CHECK(f[0].exponent == 2.0);
    CHECK(f[0].components.size() == 4);
    CHECK(f[1].components.size() == 2);
    CHECK(parse_factors(g, "").empty());
    CHECK(code_of([&] { parse_factors(g, "point(1 2 3)"); }) == ErrorCode::BadValue);
    CHECK(code_of([&] { parse_factors(g, "point(1 2 3 9)"); }) == ErrorCode::BadValue);
    CHECK(code_of([&] { parse_factors(g, "blob(1)"); }) == ErrorCode::BadValue);
    CHECK(code_of([&] { parse_factors(g, "point(1 2 3 4)^-1"); }) == ErrorCode::BadValue);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorCode::MissingKey) == 1);
    CHECK(exit_code(ErrorCode::BadValue) == 1);
    CHECK(exit_code(ErrorCode::NoConvergence) == 2);
    CHECK(exit_code(ErrorCode::ConeExit) == 3);
    CHECK(exit_code(ErrorCode::OutputExists) == 4);
    CHECK(exit_code(ErrorCode::IoError) == 4);
    CHECK(exit_code(ErrorCode::HypothesisFailed) == 5);
  }

  TEST_CASE("solve command") {
    TempDir dir;
    write_text(dir / "flat.cfg", kMinimalSolve);
    auto r = invoke({"solve", "--config", dir / "flat.cfg", "--out-potential", dir / "phi.csv", "--report",
                     dir / "report.csv"});
    CHECK(r.code == 0);
    const ScalarField phi = read_scalar_field(dir / "phi.csv");
    CHECK(phi.max() == 0.0);
    CHECK(phi.min() == 0.0);

    // refusing to overwrite, then forcing
    auto again = invoke({"solve", "--config", dir / "flat.cfg", "--out-potential", dir / "phi.csv"});
    CHECK(again.code == 4);
    CHECK(again.err.find("OutputExists") != std::string::npos);
    CHECK(std::count(again.err.begin(), again.err.end(), '\n') == 1);
    CHECK(invoke({"solve", "--config", dir / "flat.cfg", "--out-potential", dir / "phi.csv", "--force"}).code == 0);

    write_text(dir / "nc.cfg", std::string(kMinimalSolve) +
                                   "[density]\ncosine_amplitude = 0.9\n[solver]\nmax_newton_iters = 1\n");
    CHECK(invoke({"solve", "--config", dir / "nc.cfg"}).code == 2);
    CHECK(invoke({"solve", "--config", dir / "absent.cfg"}).code == 4);
    CHECK(invoke({"solve"}).code == 1);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"solve", "--bogus"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
  }

  TEST_CASE("verify, orlicz and capacity commands") {
    TempDir dir;
    auto a = invoke({"verify", "comparison", "--seed", "5", "--out", dir / "a.csv"});
    auto b = invoke({"verify", "comparison", "--seed", "5", "--out", dir / "b.csv"});
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
    const CsvTable t = read_csv(dir / "a.csv");
    CHECK(t.header == std::vector<std::string>{"trial", "lhs", "rhs", "margin"});
    CHECK(t.rows.size() == 20);

    auto m = invoke({"verify", "monotone", "--out", dir / "m.csv"});
    CHECK(m.code == 0);
    CHECK(read_csv(dir / "m.csv").header ==
          std::vector<std::string>{"eps", "pairing", "gap", "measure_pairing", "measure_gap"});

    auto suite = invoke({"verify", "suite", "--out", dir / "suite.csv"});
    CHECK(suite.code == 0);
    const CsvTable s = read_csv(dir / "suite.csv");
    for (std::size_t k = 0; k < s.rows.size(); ++k) CHECK(s.number(k, "passed") == 1.0);

    TorusGrid g(1, 16);
    write_field(dir / "ones.csv", ScalarField(g, 1.0));
    auto o = invoke({"orlicz", "--gauge", "exp:1", "--input", dir / "ones.csv", "--report", dir / "o.csv"});
    CHECK(o.code == 0);
    CHECK(read_csv(dir / "o.csv").number(0, "norm") == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-10));
    CHECK(invoke({"orlicz", "--gauge", "cubic:1", "--input", dir / "ones.csv"}).code == 1);

    write_field(dir / "gamma.csv", HermitianFormField(g, HermitianMatrix::identity()));
    write_field(dir / "whole.csv", ScalarField(g, 1.0));
    auto c = invoke({"capacity", "--gamma", dir / "gamma.csv", "--mask", dir / "whole.csv", "--profile",
                     dir / "p.csv"});
    CHECK(c.code == 0);
    CHECK(c.out.find("cap=1 ") != std::string::npos);
    CHECK(read_csv(dir / "p.csv").header == std::vector<std::string>{"s", "a", "decay_bound"});
    write_field(dir / "empty.csv", ScalarField(g, 0.0));
    CHECK(invoke({"capacity", "--gamma", dir / "gamma.csv", "--mask", dir / "empty.csv"}).code == 0);

    fs::create_directories(dir.path / "family");
    write_field(dir / "family/zero.csv", ScalarField(g, 0.0));
    auto d = invoke({"capacity", "--gamma", dir / "gamma.csv", "--mask", dir / "whole.csv", "--family",
                     dir / "family"});
    CHECK(d.code == 0);
    CHECK(d.out.find("members=1") != std::string::npos);
  }

  TEST_CASE("installed binary") {
    TempDir dir;
    write_text(dir / "bad.cfg", std::string(kMinimalSolve) + "[equation]\nlambda = -1\n");
    const std::string cmd = std::string(CMAT_CLI_PATH) + " solve --config " + (dir / "bad.cfg") + " 2> " +
                            (dir / "err.txt");
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 1);
    const std::string err = read_text(dir / "err.txt");
    CHECK(err.rfind("error: BadValue:", 0) == 0);
    CHECK(std::count(err.begin(), err.end(), '\n') == 1);
  }
}
