#pragma once

#include <optional>
#include <vector>

#include "otdro/ctransform.hpp"
#include "otdro/divergence.hpp"
#include "otdro/objective.hpp"

namespace otdro {

struct DualProblem {
  ObjectiveFamily fam;
  std::vector<double> theta;
  TransportCost cost;
  std::optional<FDivergence> divergence;
  double r = 0.1;
  Dataset sample;
  InnerSolverConfig inner;
  double outer_tol = 1e-10;
};

struct DualSolution {
  double value = 0.0;
  double lambda_opt = 0.0;
  std::optional<double> nu_opt;
  std::optional<double> rho_opt;  // lambda_opt * nu_opt
  long evaluations = 0;
  Certificate certificate = Certificate::Exact;
  // True when the infimum is approached as lambda -> 0+; the reported value
  // is the limit and lambda_opt is 0.
  bool lambda_at_boundary = false;
};

struct LambdaFResult {
  double value = 0.0;
  double nu_opt = 0.0;
  int evaluations = 0;
};

// Generalized cumulant functional inf_{nu in [lo, hi]} { nu + E_Q[f*(phi - nu)] }
// for a finitely supported Q (weights summing to 1).  The objective is convex
// in nu; evaluations that overflow are compared through a monotone proxy so
// the search still brackets the finite minimum.
LambdaFResult lambda_f(const std::vector<double>& weights, const std::vector<double>& phi,
                       const FDivergence& f, double nu_lo, double nu_hi, double tol = 1e-10);

// Worst-case expected loss over the OT neighborhood of the empirical measure,
// through the dual inf_{lambda>0} { lambda r + E[L^c_lambda] }.
DualSolution ot_dro_dual(const DualProblem& prob);

// OT-regularized f-divergence dual
//   inf_{lambda>0} { lambda r + lambda Lambda_f[L^c_lambda / lambda] },
// with the inner infimum over nu = rho/lambda restricted to its exact bounded
// domain.
DualSolution otreg_fdiv_dual(const DualProblem& prob);

// KL case through the log-mean-exp closed form of the inner infimum; agrees
// with otreg_fdiv_dual for the KL divergence.
DualSolution kl_dro_dual(const DualProblem& prob);

enum class ErmSearch { Grid, RandomSearch, SubgradientDescent };

struct ErmResult {
  std::vector<double> theta;
  double value = 0.0;
  double eps_opt = 0.0;  // best value minus best over the refinement stage
  long evaluations = 0;
  Certificate certificate = Certificate::Exact;
};

// Approximate minimizer of the dual value over the unit theta-ball.
ErmResult erm_minimize(const DualProblem& prob, ErmSearch search, int budget);

struct LambdaLimitRow {
  double lambda = 0.0;
  double actual = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct LambdaLimitReport {
  std::vector<LambdaLimitRow> rows;
  bool all_ok = true;
};

// Checks | lambda Lambda_f[L^c_lambda / lambda] - E[L^{c_delta}] | against its
// explicit large-lambda error bound on each grid point.
LambdaLimitReport lambda_limit_check(const DualProblem& prob,
                                     const std::vector<double>& lambda_grid);

}  // namespace otdro
