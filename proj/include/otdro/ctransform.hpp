#pragma once

#include <vector>

#include "otdro/objective.hpp"
#include "otdro/transport_cost.hpp"

namespace otdro {

enum class Certificate { Exact, LowerBound };

struct InnerSolverConfig {
  enum class Strategy { Grid1D, MultiStartAscent };
  Strategy strategy = Strategy::Grid1D;
  int restarts = 4;
  int steps = 200;
  double step_size = 0.05;
  int grid_points = 512;
  double tolerance = 1e-9;
};

struct TransformResult {
  double value = 0.0;
  std::vector<double> argmax_x;
  Certificate certificate = Certificate::Exact;
};

// Adversarial transform sup_{z~} { L_theta(z~) - lambda c(z, z~) }.  Labels
// with infinite cost are excluded before the subtraction, so only same-label
// candidates enter.  For ClampedLinearMargin the problem reduces to a
// piecewise-concave 1-D maximization along the steepest attack ray and is
// solved exactly; SaturatedLogistic uses a dense ray grid with local polish
// and is certified as a lower bound.
TransformResult c_transform(const ObjectiveFamily& fam, const std::vector<double>& theta,
                            const TransportCost& cost, double lambda, const Point& z,
                            const InnerSolverConfig& cfg);

// Ball-constrained transform: max of L_theta(., y) over the closed delta-ball
// around x (intersected with the predictor box).  Does not depend on lambda.
double c_delta_transform(const ObjectiveFamily& fam, const std::vector<double>& theta,
                         double delta, Norm norm, const Point& z);

// max over the sample of L^c_lambda(z) - L^{c_delta}(z); lies in
// [0, lambda psi*(L_X / lambda)].
double delta_transform_gap(const ObjectiveFamily& fam, const std::vector<double>& theta,
                           const TransportCost& cost, double lambda, const Dataset& sample,
                           const InnerSolverConfig& cfg);

// Exact maximizer of <w, u> over { ||u||_2 <= radius } intersected with the
// box [lo, hi] (componentwise bounds containing 0).  Used by the L2-ball
// attack when the predictor box is binding.
double max_linear_over_ball_box(const std::vector<double>& w, double radius,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                std::vector<double>* argmax);

// Point minimizing the margin y <theta, x~> over distance <= t from z.x
// (within the predictor box); the location the steepest attack reaches at
// budget t.
std::vector<double> attack_point(const ObjectiveFamily& fam, const std::vector<double>& theta,
                                 Norm norm, const Point& z, double t);

}  // namespace otdro
