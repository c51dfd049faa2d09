#pragma once

#include <string>
#include <vector>

#include "otdro/extended_real.hpp"

namespace otdro {

// Constants extracted from a divergence family for the concentration bounds.
// tail_sup = sup_{s >= nu_tilde} |s * (f*)'_+(-s)|, C2 = (f*)'_+(-nu_tilde).
struct DivergenceConstants {
  double s0 = 0.0;
  double inf_f_star = 0.0;
  double nu_tilde = 0.0;
  double p0 = 0.0;
  double M = 0.0;
  double tail_sup = 0.0;
  double C2 = 0.0;
};

// f-divergence generator: KL (f(t) = t log t) or the power family
// f_alpha(t) = (t^alpha - 1) / (alpha (alpha - 1)) with alpha > 1.
//
// All member functions are pure; instances are safe to share across threads.
class FDivergence {
 public:
  enum class Family { KL, Alpha };

  static FDivergence kl() { return FDivergence(Family::KL, 0.0); }
  static FDivergence alpha(double a);

  Family family() const { return family_; }
  double alpha_param() const { return alpha_; }

  // Domain of finiteness of f is [0, inf) for both families.
  double domain_lo() const { return 0.0; }

  // f extended by continuity at t = 0 (t log t -> 0); negative t rejected.
  ExtReal f(double t) const;

  // Convex conjugate f*(s); finite on all of R for both families.
  double f_star(double s) const;

  // Right derivative of f*; non-decreasing in s.
  double f_star_rderiv(double s) const;

  // s0 = f'_+(1); satisfies f*(s0) = s0 and (f*)'_+(s0) = 1.
  double s0() const;

  double inf_f_star() const;

  // Largest admissible nu_tilde with (f*)'_+(-M - nu_tilde) >= 1/p0.
  double nu_tilde(double p0, double M) const;

  // Closed-form bound for sup_{s >= nu_tilde} |s (f*)'_+(-s)|.
  double tail_sup(double nu_tilde) const;

  DivergenceConstants constants(double p0, double M) const;

  // D_f(nu || mu) for distributions on a common finite index set; +inf when
  // nu is not absolutely continuous w.r.t. mu.
  ExtReal divergence(const std::vector<double>& nu, const std::vector<double>& mu) const;

  std::string name() const;

 private:
  FDivergence(Family f, double a) : family_(f), alpha_(a) {}

  Family family_;
  double alpha_;
};

}  // namespace otdro
