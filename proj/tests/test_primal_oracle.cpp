#include <doctest.h>

#include <cmath>

#include "otdro/dual_solver.hpp"
#include "otdro/primal_oracle.hpp"
#include "otdro/rng.hpp"
#include "otdro/simplex.hpp"
#include "support/oracles.hpp"

using namespace otdro;

namespace {

TransportCost make_cost(Penalty p, double delta, Norm norm, double M = 0.0) {
  TransportCost c;
  c.penalty = std::move(p);
  c.delta = delta;
  c.norm = norm;
  c.M = M;
  return c;
}

// Analytic instance: one source at the left edge of [0, 1], loss u, cost u^2.
FiniteInstance analytic_instance(int n_candidates) {
  FiniteInstance inst;
  std::vector<FiniteInstance::Candidate> list;
  for (int i = 0; i <= n_candidates; ++i) {
    const double u = static_cast<double>(i) / n_candidates;
    list.push_back({{u}, u, u * u});
  }
  inst.candidates.push_back(std::move(list));
  inst.self_index.push_back(0);
  return inst;
}

}  // namespace

TEST_CASE("simplex agrees with vertex enumeration on random small LPs") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rng.uniform_int(4);  // up to 6 variables
    const int m = 2 + rng.uniform_int(3);
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    std::vector<double> b(m), c(n);
    for (auto& row : A)
      for (auto& v : row) v = 0.1 + rng.uniform();
    for (auto& v : b) v = 0.5 + rng.uniform();
    for (auto& v : c) v = rng.uniform() - 0.25;

    // standard form with slacks; slack basis is feasible since b >= 0
    std::vector<std::vector<double>> Aeq(m, std::vector<double>(n + m, 0.0));
    std::vector<double> ceq(n + m, 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) Aeq[i][j] = A[i][j];
      Aeq[i][n + i] = 1.0;
    }
    for (int j = 0; j < n; ++j) ceq[j] = c[j];
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    const SimplexResult res = simplex_max(Aeq, b, ceq, basis);
    REQUIRE(res.status == SimplexResult::Status::Optimal);
    const double brute = oracles::enumerate_lp_max(A, b, c);
    CHECK(res.value == doctest::Approx(brute).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("transport LP: analytic value, zero budget, slack budget") {
  const FiniteInstance inst = analytic_instance(200);  // grid includes 0.25
  CHECK(ot_primal_lp(inst, 1.0 / 16.0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(ot_primal_lp(inst, 0.0) == doctest::Approx(0.0));  // loss at the source
  CHECK(ot_primal_lp(inst, 10.0) == doctest::Approx(1.0)); // full attack
}

TEST_CASE("transport LP is monotone in r") {
  const FiniteInstance inst = analytic_instance(64);
  double prev = -1.0;
  for (double r : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0}) {
    const double v = ot_primal_lp(inst, r);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("instance builder produces valid finite instances") {
  SplitMix64 rng(42);
  const auto fam = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::Linf, 1.5);
  const auto cost = make_cost(Penalty::power_law(1.0, 2.0), 0.2, Norm::Linf);
  Dataset ds;
  for (int i = 0; i < 5; ++i)
    ds.points.push_back(Point{{rng.normal(), rng.normal()}, rng.uniform() < 0.5 ? 1 : -1});
  for (auto& p : ds.points)
    for (auto& c : p.x) c = std::clamp(c, -1.5, 1.5);
  const FiniteInstance inst =
      make_finite_instance(fam, {0.5, -0.3}, cost, ds, 10, 2.0);
  CHECK(inst.n_sources() == 5);
  CHECK_NOTHROW(inst.validate());
  for (const auto& list : inst.candidates) CHECK(list.size() >= 2);
}

TEST_CASE("strong duality on randomized small OT instances") {
  SplitMix64 rng(43);
  InnerSolverConfig inner;
  for (int trial = 0; trial < 12; ++trial) {
    DualProblem p;
    p.fam = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::Linf, 1.5);
    p.theta = {0.4 * rng.normal(), 0.4 * rng.normal()};
    double nrm = std::sqrt(p.theta[0] * p.theta[0] + p.theta[1] * p.theta[1]);
    if (nrm > 1.0)
      for (auto& c : p.theta) c /= nrm;
    p.cost = make_cost(Penalty::power_law(1.0, 2.0), 0.1, Norm::Linf);
    p.r = 0.02 + 0.2 * rng.uniform();
    p.inner = inner;
    for (int i = 0; i < 4; ++i) {
      Point z{{1.5 * (2.0 * rng.uniform() - 1.0), 1.5 * (2.0 * rng.uniform() - 1.0)},
              rng.uniform() < 0.5 ? 1 : -1};
      p.sample.points.push_back(z);
    }
    const DualSolution dual = ot_dro_dual(p);
    if (dual.lambda_at_boundary) continue;
    std::vector<std::vector<std::vector<double>>> extras(p.sample.size());
    for (std::size_t i = 0; i < p.sample.points.size(); ++i)
      extras[i].push_back(
          c_transform(p.fam, p.theta, p.cost, dual.lambda_opt, p.sample.points[i], inner)
              .argmax_x);
    const FiniteInstance inst =
        make_finite_instance(p.fam, p.theta, p.cost, p.sample, 30, 3.5, extras);
    const double primal = ot_primal_lp(inst, p.r);
    const DualityReport rep = weak_duality_check(primal, dual.value, dual.certificate,
                                                 1e-5 * (1.0 + std::fabs(dual.value)));
    CHECK(rep.ok);
  }
}

TEST_CASE("reweighting primal: zero radius pins the empirical distribution") {
  FiniteInstance inst = analytic_instance(16);
  for (const FDivergence& f : {FDivergence::kl(), FDivergence::alpha(2.0)}) {
    const OtRegPrimalResult res = otreg_primal_convex(inst, f, 0.0);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("reweighting primal without transport matches the classical dual") {
  // candidates = sources only: pure f-divergence neighborhood on raw losses
  SplitMix64 rng(44);
  for (const FDivergence& f : {FDivergence::kl(), FDivergence::alpha(2.0)}) {
    FiniteInstance inst;
    const int n = 4;
    std::vector<double> losses;
    for (int i = 0; i < n; ++i) {
      const double l = rng.uniform();
      losses.push_back(l);
      inst.candidates.push_back({{{static_cast<double>(i)}, l, 0.0}});
      inst.self_index.push_back(0);
    }
    const double r = 0.15;
    OtRegPrimalConfig cfg;
    const OtRegPrimalResult primal = otreg_primal_convex(inst, f, r, cfg);

    // Independent 1-D oracle on raw losses through the classical dual
    // inf_{lam>0, rho} { lam r + rho + lam E[f*((L - rho)/lam)] }.
    const double oracle = oracles::grid_min(
        [&](double lam) {
          const double lo = *std::min_element(losses.begin(), losses.end()) - f.s0() * lam;
          const double hi = *std::max_element(losses.begin(), losses.end());
          return oracles::grid_min(
              [&](double rho) {
                double acc = lam * r + rho;
                for (double l : losses) acc += lam * f.f_star((l - rho) / lam) / n;
                return acc;
              },
              lo - 1.0, hi + 1.0, 4000);
        },
        1e-2, 40.0, 4000);
    CHECK(primal.value == doctest::Approx(oracle).epsilon(2e-3).scale(1.0));
  }
}

TEST_CASE("weak duality report contract") {
  CHECK(weak_duality_check(1.0, 1.0000001, Certificate::Exact, 1e-5).ok);
  CHECK_FALSE(weak_duality_check(1.1, 1.0, Certificate::Exact, 1e-5).ok);
  // lower-bound duals only enforce one side
  CHECK(weak_duality_check(0.5, 1.0, Certificate::LowerBound, 1e-5).ok);
  CHECK_FALSE(weak_duality_check(0.5, 1.0, Certificate::Exact, 1e-5).ok);
}
