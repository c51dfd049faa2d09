#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "otdro/ctransform.hpp"
#include "otdro/divergence.hpp"
#include "otdro/objective.hpp"

namespace otdro {

struct LambdaNRule {
  double C = 1.0;
  double exponent = 0.5;
  double lambda_n(double n) const;
};

struct BoundConfig {
  // Two-way split h1 = gamma e, h2 = (1-gamma) e; unset -> the per-family
  // optimized split.
  std::optional<double> split_gamma;
  std::array<double, 3> split3 = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  LambdaNRule lambda_n_rule;
  double p0 = 0.25;
  int integration_points = 2048;
};

// log of (ceil(M lambda*(eps2) / (2 eps2)) + 1) * N(eps1, G).
double log_covering_bound_gc(const ObjectiveFamily& fam, const TransportCost& cost,
                             double eps1, double eps2);

// Entropy-integral deviation envelope for the OT dual objective class,
// 12 n^{-1/2} * integral over (0, beta) of sqrt(log covering bound).
double dn_bound(const ObjectiveFamily& fam, const TransportCost& cost, double n,
                const BoundConfig& cfg);

// Per-family closed-form upper bound for the same integral.
double dn_closed_form(const ObjectiveFamily& fam, const TransportCost& cost, double n);

// Large-lambda envelope: penalty term + conjugate curvature term + entropy
// integral of the base class.
double rn_bound(const ObjectiveFamily& fam, const TransportCost& cost, const FDivergence& f,
                double n, const BoundConfig& cfg);

// Small-lambda envelope from the reweighting function class, integrated over
// (0, beta C2) with a three-way split.
double rn_tilde_bound(const ObjectiveFamily& fam, const TransportCost& cost,
                      const FDivergence& f, double n, const BoundConfig& cfg,
                      const DivergenceConstants& consts);

// C1 constant of the reweighting class (bound on the lambda-derivative).
double g_class_lambda_constant(const FDivergence& f, const DivergenceConstants& consts);

enum class Theorem { OtValues, OtErm, OtRegValues, OtRegErm };

struct TailConstants {
  double beta = 1.0;
  double C2 = 1.0;  // (f*)'_+(-nu_tilde), OT-regularized theorems only
  std::vector<double> p_y;
  double p0 = 0.0;
  double delta_opt = 0.0;  // optimizer failure probability, ERM theorems
};

struct TailResult {
  double value = 0.0;
  bool clamped = false;  // true when the raw expression exceeded 1
};

TailResult tail_probability(Theorem thm, double n, double eps, const TailConstants& c);

struct BoundReport {
  double D_n = 0.0;
  double R_n = 0.0;
  double R_n_tilde = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double lambda_n = 0.0;
  DivergenceConstants consts;
  // echoed inputs
  double beta = 0.0, L_X = 0.0, L_Theta = 0.0, M = 0.0;
  int k = 0;
  std::vector<std::pair<double, TailResult>> value_tails;  // (eps, tail) OT-reg values thm
};

BoundReport compute_bound_report(const ObjectiveFamily& fam, const TransportCost& cost,
                                 const FDivergence& f, double n, const BoundConfig& cfg,
                                 const std::vector<double>& p_y,
                                 const std::vector<double>& eps_grid);

struct GBoundsFailure {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double lambda = 0.0, nu = 0.0;
};

struct GBoundsReport {
  int tuples = 0;
  std::vector<GBoundsFailure> failures;
  bool ok = true;
};

struct GBoundsConfig {
  int tuples = 1000;
  double slack = 1e-7;
  std::uint64_t seed = 17;
};

// Samples (theta, lambda, nu, z) tuples and checks the uniform, theta- and
// nu-Lipschitz, and lambda-derivative bounds of the reweighting functions
// g_{theta,lambda,nu}(z) = lambda (f*(-nu) - f*(-Delta L^c / lambda - nu)).
GBoundsReport g_function_bounds_check(const ObjectiveFamily& fam, const TransportCost& cost,
                                      const FDivergence& f, const DivergenceConstants& consts,
                                      double lambda_n, const Dataset& sample,
                                      const InnerSolverConfig& inner, const GBoundsConfig& cfg);

}  // namespace otdro
