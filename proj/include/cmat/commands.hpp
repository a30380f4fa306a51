#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmat/config.hpp"
#include "cmat/degenerate.hpp"
#include "cmat/error.hpp"

namespace cmat {

// 1 usage or configuration, 2 NoConvergence, 3 ConeExit, 4 output exists or
// I/O failure, 5 any other domain error.
int exit_code(ErrorCode code) noexcept;

// Zero/pole factors from `kind(args)^exponent` items separated by ';':
// `point(i1 ... i2n)` puts an isolated zero at the center of the cell with that
// lower corner, `curve(direction a b)` a zero along {z_direction = a + i b}.
std::vector<DensityFactor> parse_factors(const TorusGrid& grid, const std::string& text);

// Runs a validated configuration, writing its artifacts and a one-line summary
// to `out`. Existing outputs are refused unless config.force is set.
void run(const RunConfig& config, std::ostream& out);

// Full command line: parsing, run, and error mapping with a one-line
// diagnostic `error: <code>: <message>` on `err`.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cmat
