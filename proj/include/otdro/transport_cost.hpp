#pragma once

#include <string>
#include <vector>

#include "otdro/extended_real.hpp"

namespace otdro {

enum class Norm { L2, Linf };

double norm_of(const std::vector<double>& v, Norm n);
double norm_dist(const std::vector<double>& a, const std::vector<double>& b, Norm n);

struct Point {
  std::vector<double> x;
  int y = 0;
};

// Penalty psi applied to the norm excess over the delta-ball.  All families
// satisfy psi(0) = 0, psi convex non-decreasing, psi*(t) finite for t > 0 and
// psi*(t) = o(t) as t -> 0+.
class Penalty {
 public:
  enum class Family { HardBall, PowerLaw, PowerPlusLinear, Exponential };

  static Penalty hard_ball();
  static Penalty power_law(double alpha, double q);                    // alpha t^q, q > 1
  static Penalty power_plus_linear(double alpha, double eta, double q);  // alpha t^q + eta t
  static Penalty exponential(double alpha, double q);                  // alpha (e^{qt} - 1), q > 0

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double q() const { return q_; }
  double eta() const { return eta_; }

  ExtReal psi(double t) const;       // t >= 0; HardBall -> +inf for t > 0
  double psi_star(double s) const;   // closed form, s > 0
  // Smallest lambda with lambda * psi*(L_X / lambda) <= eps2; 0 for HardBall.
  double lambda_star(double eps2, double L_X) const;

  std::string name() const;

 private:
  Penalty(Family f, double a, double q, double e) : family_(f), alpha_(a), q_(q), eta_(e) {}

  Family family_;
  double alpha_ = 0.0;
  double q_ = 0.0;
  double eta_ = 0.0;
};

// Ground cost on Z = X x Y: infinite across labels, phi_{psi,delta}(||x~ - x||)
// within a label, where phi_{psi,delta}(t) = psi(t - delta) 1_{t >= delta}.
struct TransportCost {
  Penalty penalty = Penalty::hard_ball();
  double delta = 0.0;
  Norm norm = Norm::L2;
  double M = 0.0;  // uniform bound on finite costs (modeling input)

  ExtReal phi(double t) const;  // radial profile
  ExtReal cost(const Point& z, const Point& z_tilde) const;

  // Largest finite cost reachable inside the box [-box_b, box_b]^d under the
  // configured norm; used to validate the user-supplied M.
  double max_finite_cost_in_box(double box_b, int dim) const;
  void validate_M_against_box(double box_b, int dim) const;
};

}  // namespace otdro
