#pragma once

#include <string>

#include "cmat/field.hpp"

namespace cmat {

// Convex gauge P with P(0) = 0 defining the Orlicz space L^P.
//   Power(p):  t^p
//   PBeta(b):  t log^b(e + t)        (L log^b L)
//   QBeta(b):  exp(t^{1/b}) - 1      (Exp^{1/b} L)
class OrliczGauge {
 public:
  enum class Kind { Power, PBeta, QBeta };

  static OrliczGauge power(double p);
  static OrliczGauge p_beta(double beta);
  static OrliczGauge q_beta(double beta);
  // Parses `power:p`, `plog:beta` or `exp:beta`.
  static OrliczGauge parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  // The doubling condition P(2t) <= 2^C P(t) holds for Power and PBeta only.
  bool doubling() const noexcept { return kind_ != Kind::QBeta; }
  std::string name() const;

  double operator()(double t) const;

 private:
  OrliczGauge(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

double gauge_eval(const OrliczGauge& g, double t);

// Luxemburg norm inf{lambda > 0 : integral of P(|f|/lambda) weight <= 1}.
// Returns the smallest bracketed lambda with integral <= 1 after bisection to
// relative width 1e-14.
double luxemburg_norm(const ScalarField& f, const OrliczGauge& g, const ScalarField& weight);
double luxemburg_norm(const ScalarField& f, const OrliczGauge& g);

// Norm of the constant 1 in Exp^{1/beta} L for a space of total volume vol.
double exp_norm_of_one(double beta, double vol);

// Best constant C in xy <= C (P_beta(x) + Q_beta(y)); exactly 1 for beta = 1,
// otherwise a numerical maximization (a lower estimate of the supremum).
double holder_constant(double beta);

struct HolderResult {
  double lhs;  // |integral of f g|
  double rhs;  // 2 C_beta |f|_{L log^b L} |g|_{Exp^{1/b} L}
};
HolderResult holder_orlicz(const ScalarField& f, const ScalarField& g, double beta,
                           const ScalarField& weight);
HolderResult holder_orlicz(const ScalarField& f, const ScalarField& g, double beta);

struct LlogLBound {
  double norm;   // |f|_{L log^b L}
  double bound;  // integral of f log^b(e + f/|f|_{L^1})
};
LlogLBound llogl_upper_bound(const ScalarField& f, double beta, const ScalarField& weight);
LlogLBound llogl_upper_bound(const ScalarField& f, double beta);

// (1/M) integral of f log^{n+eps}(e + f/M) against the weight, M the class mass.
double i_functional(const ScalarField& f, double class_mass, double eps, int n,
                    const ScalarField& weight);
double i_functional(const ScalarField& f, double class_mass, double eps, int n);

}  // namespace cmat
