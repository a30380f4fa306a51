#pragma once

#include <string>
#include <variant>
#include <vector>

namespace cmat {

// Numbers are written with %.17g, so they read back bit-identically.
using CsvCell = std::variant<double, std::string>;
using CsvRow = std::vector<CsvCell>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; BadValue when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

std::string format_number(double v);

// Header line then one line per row, every line newline-terminated. Rows
// must match the header arity (ArityMismatch); cells may not contain commas
// or line breaks.
std::string render_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows);
void write_csv(const std::vector<CsvRow>& rows, const std::vector<std::string>& header, const std::string& path);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

}  // namespace cmat
