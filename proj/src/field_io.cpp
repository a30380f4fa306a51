#include "cmat/field_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "cmat/error.hpp"

namespace cmat {
namespace {

bool is_binary(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_samples(const std::string& path, const TorusGrid& grid, const std::vector<double>& flat,
                   int per_point) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << grid.complex_dim() << ',' << grid.resolution() << '\n';
  if (is_binary(path)) {
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));
  } else {
    std::string line;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      line.clear();
      for (int c = 0; c < per_point; ++c) {
        if (c) line += ',';
        line += format_double(flat[i * per_point + c]);
      }
      line += '\n';
      out << line;
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

struct RawField {
  int dim;
  int resolution;
  std::vector<double> flat;
};

RawField read_samples(const std::string& path, int per_point_n1, int per_point_n2) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::IoError, path + ": missing header");
  int dim = 0, res = 0;
  if (std::sscanf(header.c_str(), "%d,%d", &dim, &res) != 2)
    throw Error(ErrorCode::BadValue, path + ":1: header must be `dim,resolution`");
  const TorusGrid grid(dim, res);
  const int per_point = dim == 1 ? per_point_n1 : per_point_n2;
  RawField raw{dim, res, std::vector<double>(grid.size() * per_point)};
  if (is_binary(path)) {
    in.read(reinterpret_cast<char*>(raw.flat.data()),
            static_cast<std::streamsize>(raw.flat.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(raw.flat.size() * sizeof(double)))
      throw Error(ErrorCode::IoError, path + ": truncated binary payload");
    return raw;
  }
  std::string line;
  std::size_t lineno = 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ++lineno;
    if (!std::getline(in, line))
      throw Error(ErrorCode::IoError, path + ": expected " + std::to_string(grid.size()) +
                                          " samples, file ends at line " + std::to_string(lineno));
    const char* p = line.c_str();
    for (int c = 0; c < per_point; ++c) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p || errno == ERANGE)
        throw Error(ErrorCode::BadValue, path + ":" + std::to_string(lineno) + ": bad number");
      raw.flat[i * per_point + c] = v;
      p = end;
      if (c + 1 < per_point) {
        if (*p != ',')
          throw Error(ErrorCode::BadValue, path + ":" + std::to_string(lineno) + ": expected " +
                                               std::to_string(per_point) + " columns");
        ++p;
      }
    }
    while (*p == ' ' || *p == '\r') ++p;
    if (*p != '\0')
      throw Error(ErrorCode::BadValue, path + ":" + std::to_string(lineno) + ": trailing data");
  }
  return raw;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  write_samples(path, f.grid(), std::vector<double>(f.values().begin(), f.values().end()), 1);
}

void write_field(const std::string& path, const ComplexField& f) {
  std::vector<double> flat;
  flat.reserve(2 * f.size());
  for (Complex v : f.values()) {
    flat.push_back(v.real());
    flat.push_back(v.imag());
  }
  write_samples(path, f.grid(), flat, 2);
}

void write_field(const std::string& path, const HermitianFormField& f) {
  std::vector<double> flat;
  const bool full = f.dim() == 2;
  for (const auto& m : f.matrices()) {
    flat.push_back(m.a11);
    if (full) {
      flat.push_back(m.a22);
      flat.push_back(m.a12.real());
      flat.push_back(m.a12.imag());
    }
  }
  write_samples(path, f.grid(), flat, full ? 4 : 1);
}

ScalarField read_scalar_field(const std::string& path) {
  RawField raw = read_samples(path, 1, 1);
  ScalarField f(TorusGrid(raw.dim, raw.resolution), std::move(raw.flat));
  f.require_finite(path);
  return f;
}

ComplexField read_complex_field(const std::string& path) {
  RawField raw = read_samples(path, 2, 2);
  const TorusGrid grid(raw.dim, raw.resolution);
  ComplexField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = Complex(raw.flat[2 * i], raw.flat[2 * i + 1]);
  f.require_finite(path);
  return f;
}

HermitianFormField read_form_field(const std::string& path) {
  RawField raw = read_samples(path, 1, 4);
  const TorusGrid grid(raw.dim, raw.resolution);
  HermitianFormField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (raw.dim == 1) {
      f[i].a11 = raw.flat[i];
    } else {
      f[i] = HermitianMatrix{raw.flat[4 * i], raw.flat[4 * i + 1],
                             Complex(raw.flat[4 * i + 2], raw.flat[4 * i + 3])};
    }
  }
  for (double v : raw.flat)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, path + ": non-finite sample");
  return f;
}

}  // namespace cmat
