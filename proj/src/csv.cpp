#include "cmat/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cmat/error.hpp"

namespace cmat {

namespace {

void check_cell(const std::string& s) {
  if (s.find_first_of(",\r\n") != std::string::npos)
    throw Error(ErrorCode::BadValue, "CSV cell may not contain a comma or line break: '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw Error(ErrorCode::BadValue, "CSV has no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& s = rows.at(row).at(column(name));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw Error(ErrorCode::BadValue, "not a number in column '" + name + "': '" + s + "'");
  return v;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows) {
  if (header.empty()) throw Error(ErrorCode::ArityMismatch, "CSV schema has no columns");
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    check_cell(header[k]);
    out += (k ? "," : "") + header[k];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw Error(ErrorCode::ArityMismatch, "CSV row " + std::to_string(r) + " has " +
                                                std::to_string(rows[r].size()) + " cells, schema has " +
                                                std::to_string(header.size()));
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) out += ',';
      if (const double* d = std::get_if<double>(&rows[r][k])) {
        out += format_number(*d);
      } else {
        const auto& s = std::get<std::string>(rows[r][k]);
        check_cell(s);
        out += s;
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<CsvRow>& rows, const std::vector<std::string>& header, const std::string& path) {
  const std::string text = render_csv(header, rows);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvTable t;
  if (!std::getline(in, line) || line.empty()) throw Error(ErrorCode::BadValue, "CSV has no header line");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw Error(ErrorCode::ArityMismatch, "CSV line " + std::to_string(t.rows.size() + 2) + " has " +
                                                std::to_string(cells.size()) + " cells");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_csv(s.str());
}

}  // namespace cmat
