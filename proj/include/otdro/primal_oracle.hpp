#pragma once

#include <string>
#include <vector>

#include "otdro/ctransform.hpp"
#include "otdro/divergence.hpp"
#include "otdro/objective.hpp"

namespace otdro {

// Discrete restriction of the primal feasible set: n equally weighted source
// points, each with a finite-cost candidate grid (the source itself always
// among its candidates at cost 0).
struct FiniteInstance {
  struct Candidate {
    std::vector<double> x;
    double loss = 0.0;
    double cost = 0.0;
  };
  std::vector<std::vector<Candidate>> candidates;  // per source
  std::vector<int> self_index;                     // position of the source in its own list

  std::size_t n_sources() const { return candidates.size(); }
  void validate() const;
};

// Builds a finite instance from a dataset: per source, evenly spaced ray
// points up to max_radius plus any extra candidate locations (e.g. the dual
// solver's inner argmax points).  Infinite-cost candidates are never created.
FiniteInstance make_finite_instance(const ObjectiveFamily& fam, const std::vector<double>& theta,
                                    const TransportCost& cost, const Dataset& sample,
                                    int grid_per_source, double max_radius,
                                    const std::vector<std::vector<std::vector<double>>>&
                                        extra_candidates = {});

// Worst-case expected loss over couplings within transport budget r, solved
// exactly as a dense LP.
double ot_primal_lp(const FiniteInstance& inst, double r);

struct OtRegPrimalConfig {
  int phases = 24;           // step size halves each phase
  int iters_per_phase = 4000;
  double step0 = 0.25;
  std::vector<double> mu_schedule = {10.0, 100.0, 1000.0};
  std::uint64_t seed = 1;
};

struct OtRegPrimalResult {
  double value = 0.0;       // best feasible objective (a valid lower bound)
  bool converged = false;
  double final_violation = 0.0;
  long iterations = 0;
};

// Worst-case expected loss over the OT-regularized divergence ball, by
// projected subgradient ascent on an exact-penalty Lagrangian over the
// coupling simplex.  Deliberately shares no code with the dual solvers.
OtRegPrimalResult otreg_primal_convex(const FiniteInstance& inst, const FDivergence& f,
                                      double r, const OtRegPrimalConfig& cfg = {});

struct DualityReport {
  bool ok = false;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  std::string message;
};

// primal <= dual + tol always; for Exact dual certificates the reverse holds
// too when the candidate grid contains the dual argmax points.
DualityReport weak_duality_check(double primal, double dual, Certificate dual_certificate,
                                 double tol);

}  // namespace otdro
