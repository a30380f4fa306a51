#pragma once

#include <string>

#include "cmat/field.hpp"

namespace cmat {

// Field files hold a header line `dim,resolution` followed by the samples in
// row-major order. Paths ending in `.bin` store the samples as raw native
// doubles after the header line; anything else is CSV with one sample per
// line (complex as `re,im`, forms as `a11` for n = 1 or `a11,a22,re12,im12`).
void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const ComplexField& f);
void write_field(const std::string& path, const HermitianFormField& f);

ScalarField read_scalar_field(const std::string& path);
ComplexField read_complex_field(const std::string& path);
HermitianFormField read_form_field(const std::string& path);

}  // namespace cmat
