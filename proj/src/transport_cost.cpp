#include "otdro/transport_cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otdro {

double norm_of(const std::vector<double>& v, Norm n) {
  if (n == Norm::L2) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double norm_dist(const std::vector<double>& a, const std::vector<double>& b, Norm n) {
  if (a.size() != b.size()) throw std::invalid_argument("norm_dist: dimension mismatch");
  if (n == Norm::L2) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

Penalty Penalty::hard_ball() { return Penalty(Family::HardBall, 0.0, 0.0, 0.0); }

Penalty Penalty::power_law(double alpha, double q) {
  if (!(alpha > 0.0) || !(q > 1.0))
    throw std::invalid_argument("power_law: need alpha > 0, q > 1");
  return Penalty(Family::PowerLaw, alpha, q, 0.0);
}

Penalty Penalty::power_plus_linear(double alpha, double eta, double q) {
  if (!(alpha > 0.0) || !(eta > 0.0) || !(q > 1.0))
    throw std::invalid_argument("power_plus_linear: need alpha > 0, eta > 0, q > 1");
  return Penalty(Family::PowerPlusLinear, alpha, q, eta);
}

Penalty Penalty::exponential(double alpha, double q) {
  if (!(alpha > 0.0) || !(q > 0.0))
    throw std::invalid_argument("exponential: need alpha > 0, q > 0");
  return Penalty(Family::Exponential, alpha, q, 0.0);
}

ExtReal Penalty::psi(double t) const {
  if (t < 0.0) throw std::invalid_argument("psi: t must be >= 0");
  switch (family_) {
    case Family::HardBall:
      return t > 0.0 ? ExtReal::pos_inf() : ExtReal::finite(0.0);
    case Family::PowerLaw:
      return ExtReal::finite(alpha_ * std::pow(t, q_));
    case Family::PowerPlusLinear:
      return ExtReal::finite(alpha_ * std::pow(t, q_) + eta_ * t);
    case Family::Exponential:
      return ExtReal::finite(alpha_ * std::expm1(q_ * t));
  }
  throw std::logic_error("psi: unreachable");
}

double Penalty::psi_star(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("psi_star: s must be > 0");
  switch (family_) {
    case Family::HardBall:
      return 0.0;
    case Family::PowerLaw:
      return alpha_ * (q_ - 1.0) * std::pow(s / (alpha_ * q_), q_ / (q_ - 1.0));
    case Family::PowerPlusLinear:
      if (s <= eta_) return 0.0;
      return alpha_ * (q_ - 1.0) * std::pow((s - eta_) / (alpha_ * q_), q_ / (q_ - 1.0));
    case Family::Exponential: {
      // Breakpoint s = alpha q belongs to the zero branch; both branches
      // evaluate to 0 there.
      const double aq = alpha_ * q_;
      if (s <= aq) return 0.0;
      return s / q_ * std::log(s / aq) - alpha_ * (s / aq - 1.0);
    }
  }
  throw std::logic_error("psi_star: unreachable");
}

double Penalty::lambda_star(double eps2, double L_X) const {
  if (!(eps2 > 0.0)) throw std::invalid_argument("lambda_star: eps2 must be > 0");
  if (!(L_X > 0.0)) throw std::invalid_argument("lambda_star: L_X must be > 0");
  switch (family_) {
    case Family::HardBall:
      return 0.0;
    case Family::PowerLaw:
      return std::pow(L_X / q_, q_) * std::pow(q_ - 1.0, q_ - 1.0) /
             (alpha_ * std::pow(eps2, q_ - 1.0));
    case Family::PowerPlusLinear:
    case Family::Exponential: {
      // h(lambda) = lambda psi*(L_X/lambda) is non-increasing, diverges as
      // lambda -> 0+ and vanishes for lambda >= hi, so the threshold is the
      // unique root of h = eps2 in (0, hi] -- found by bisection.
      const double hi =
          family_ == Family::PowerPlusLinear ? L_X / eta_ : L_X / (alpha_ * q_);
      auto h = [&](double lam) { return lam * psi_star(L_X / lam); };
      if (h(hi) > eps2) throw std::logic_error("lambda_star: bracket upper end infeasible");
      double lo = hi;
      while (h(lo) <= eps2) {
        lo *= 0.5;
        if (lo < 1e-300) return 0.0;  // h never exceeds eps2: infimum is 0
      }
      double a = lo, b = std::min(2.0 * lo, hi);
      for (int i = 0; i < 200 && (b - a) > 1e-10 * b; ++i) {
        const double mid = 0.5 * (a + b);
        (h(mid) <= eps2 ? b : a) = mid;
      }
      return 0.5 * (a + b);
    }
  }
  throw std::logic_error("lambda_star: unreachable");
}

std::string Penalty::name() const {
  switch (family_) {
    case Family::HardBall: return "hard_ball";
    case Family::PowerLaw: return "power_law";
    case Family::PowerPlusLinear: return "power_plus_linear";
    case Family::Exponential: return "exponential";
  }
  return "?";
}

ExtReal TransportCost::phi(double t) const {
  if (t < delta) return ExtReal::finite(0.0);
  return penalty.psi(t - delta);
}

ExtReal TransportCost::cost(const Point& z, const Point& z_tilde) const {
  if (z.y != z_tilde.y) return ExtReal::pos_inf();
  return phi(norm_dist(z.x, z_tilde.x, norm));
}

double TransportCost::max_finite_cost_in_box(double box_b, int dim) const {
  const double diam = norm == Norm::L2 ? 2.0 * box_b * std::sqrt(static_cast<double>(dim))
                                       : 2.0 * box_b;
  if (penalty.family() == Penalty::Family::HardBall) return 0.0;
  const double excess = std::max(diam - delta, 0.0);
  return penalty.psi(excess).value();
}

void TransportCost::validate_M_against_box(double box_b, int dim) const {
  if (M + 1e-12 < max_finite_cost_in_box(box_b, dim))
    throw std::invalid_argument("TransportCost: M below the largest finite cost in the box");
}

}  // namespace otdro
