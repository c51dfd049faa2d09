#include "otdro/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace otdro {

FDivergence FDivergence::alpha(double a) {
  // Exponents behave fine for large alpha, but (alpha-1)^{1/(alpha-1)}
  // underflows the interesting range well before alpha = 64; reject beyond.
  if (!(a > 1.0) || a > 64.0)
    throw std::invalid_argument("FDivergence::alpha: alpha must lie in (1, 64]");
  return FDivergence(Family::Alpha, a);
}

ExtReal FDivergence::f(double t) const {
  if (t < 0.0) throw std::invalid_argument("FDivergence::f: t must be >= 0");
  if (family_ == Family::KL) {
    if (t == 0.0) return ExtReal::finite(0.0);  // limit of t log t
    return ExtReal::finite(t * std::log(t));
  }
  const double a = alpha_;
  return ExtReal::finite((std::pow(t, a) - 1.0) / (a * (a - 1.0)));
}

double FDivergence::f_star(double s) const {
  if (family_ == Family::KL) return std::exp(s - 1.0);
  const double a = alpha_;
  const double sp = std::max(s, 0.0);
  return std::pow(a - 1.0, a / (a - 1.0)) / a * std::pow(sp, a / (a - 1.0)) +
         1.0 / (a * (a - 1.0));
}

double FDivergence::f_star_rderiv(double s) const {
  if (family_ == Family::KL) return std::exp(s - 1.0);
  const double a = alpha_;
  const double sp = std::max(s, 0.0);
  return std::pow(a - 1.0, 1.0 / (a - 1.0)) * std::pow(sp, 1.0 / (a - 1.0));
}

double FDivergence::s0() const {
  return family_ == Family::KL ? 1.0 : 1.0 / (alpha_ - 1.0);
}

double FDivergence::inf_f_star() const {
  return family_ == Family::KL ? 0.0 : 1.0 / (alpha_ * (alpha_ - 1.0));
}

double FDivergence::nu_tilde(double p0, double M) const {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("nu_tilde: p0 must lie in (0,1)");
  if (M < 0.0) throw std::invalid_argument("nu_tilde: M must be >= 0");
  double nu;
  if (family_ == Family::KL) {
    nu = -1.0 - M - std::log(1.0 / p0);
  } else {
    nu = -M - std::pow(p0, -(alpha_ - 1.0)) / (alpha_ - 1.0);
  }
  // The closed forms are exact; keep the defining inequality as a guard.
  if (f_star_rderiv(-M - nu) < 1.0 / p0 - 1e-9 * (1.0 + 1.0 / p0))
    throw std::logic_error("nu_tilde: derivative condition violated");
  return nu;
}

double FDivergence::tail_sup(double nu_t) const {
  if (family_ == Family::KL)
    return std::max(std::exp(-2.0), -nu_t * std::exp(-nu_t - 1.0));
  const double a = alpha_;
  return std::pow(a - 1.0, 1.0 / (a - 1.0)) * std::pow(std::max(-nu_t, 0.0), a / (a - 1.0));
}

DivergenceConstants FDivergence::constants(double p0, double M) const {
  DivergenceConstants c;
  c.s0 = s0();
  c.inf_f_star = inf_f_star();
  c.p0 = p0;
  c.M = M;
  c.nu_tilde = nu_tilde(p0, M);
  c.tail_sup = tail_sup(c.nu_tilde);
  c.C2 = f_star_rderiv(-c.nu_tilde);
  return c;
}

ExtReal FDivergence::divergence(const std::vector<double>& nu,
                                const std::vector<double>& mu) const {
  if (nu.size() != mu.size())
    throw std::invalid_argument("divergence: index sets differ");
  double total = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (mu[i] == 0.0) {
      if (nu[i] > 0.0) return ExtReal::pos_inf();
      continue;
    }
    total += mu[i] * f(nu[i] / mu[i]).value();
  }
  return ExtReal::finite(total);
}

std::string FDivergence::name() const {
  if (family_ == Family::KL) return "kl";
  return "alpha(" + std::to_string(alpha_) + ")";
}

}  // namespace otdro
