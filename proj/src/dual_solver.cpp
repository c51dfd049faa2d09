#include "otdro/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "otdro/golden_section.hpp"
#include "otdro/rng.hpp"

namespace otdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Value of the Lambda_f objective with an overflow-safe total order: in the
// overflow zone the objective is strictly decreasing in nu, so comparing by
// -nu preserves the exact ordering.
struct GuardedValue {
  double v = 0.0;
  bool huge = false;
  double nu = 0.0;

  friend bool operator<(const GuardedValue& a, const GuardedValue& b) {
    if (a.huge && b.huge) return a.nu > b.nu;
    if (a.huge != b.huge) return !a.huge;
    return a.v < b.v;
  }
};

GuardedValue lambda_f_objective(const std::vector<double>& weights,
                                const std::vector<double>& phi, const FDivergence& f,
                                double nu) {
  GuardedValue g;
  g.nu = nu;
  if (f.family() == FDivergence::Family::KL) {
    std::vector<double> terms(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
      terms[i] = phi[i] - nu - 1.0 + std::log(weights[i]);
    const double H = logsumexp(terms);
    if (H > 700.0) {
      g.huge = true;
      return g;
    }
    g.v = nu + std::exp(H);
    return g;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double term = f.f_star(phi[i] - nu);
    if (!std::isfinite(term) || term > 1e290) {
      g.huge = true;
      return g;
    }
    acc += weights[i] * term;
  }
  g.v = nu + acc;
  return g;
}

struct OuterResult {
  double lambda = 0.0;
  double value = 0.0;
  bool at_boundary = false;
};

// Adaptive log-bracketing and golden-section minimization of a convex
// g(lambda) over lambda > 0.  Starts from [1e-3, 1e3], grows the bracket by
// factor 4 until a rising right edge is seen, shrinks the left edge until a
// falling slope is seen or lambda reaches 1e-8; if the function is still
// non-increasing there, the infimum is taken at the lambda -> 0+ boundary
// with the explicit limit value.
OuterResult minimize_over_lambda(const std::function<double(double)>& g,
                                 double limit_value_at_zero, double outer_tol) {
  double lo = 1e-3, hi = 1e3;
  double g_lo = g(lo), g_hi = g(hi);
  // Grow right until a rising edge proves the minimum lies at or before the
  // last probe; keep that probe inside the bracket.
  int guard = 0;
  while (true) {
    const double hi2 = hi * 4.0;
    const double g_hi2 = g(hi2);
    if (g_hi2 >= g_hi) {
      hi = hi2;
      break;
    }
    hi = hi2;
    g_hi = g_hi2;
    if (++guard > 40) throw std::runtime_error("dual solver: lambda bracket grew past 1e27");
  }
  // Shrink left symmetrically; by convexity g(lo/4) >= g(lo) pins the
  // minimum to the right of lo/4.
  bool boundary_candidate = false;
  while (true) {
    const double lo2 = lo / 4.0;
    const double g_lo2 = g(lo2);
    if (g_lo2 >= g_lo) {
      lo = lo2;
      break;
    }
    lo = lo2;
    g_lo = g_lo2;
    if (lo <= 1e-8) {
      boundary_candidate = true;
      break;
    }
  }

  const double ulo = std::log(lo), uhi = std::log(hi);
  GoldenResult gr = golden_section_min(
      [&](double u) { return g(std::exp(u)); }, ulo, uhi,
      std::max(outer_tol, 1e-13), 300);
  OuterResult res;
  res.lambda = std::exp(gr.x);  // midpoint of the final bracket
  res.value = g(res.lambda);
  if (boundary_candidate && limit_value_at_zero < res.value) {
    res.lambda = 0.0;
    res.value = limit_value_at_zero;
    res.at_boundary = true;
  }
  return res;
}

struct TransformBatch {
  std::vector<double> values;
  Certificate certificate = Certificate::Exact;
};

TransformBatch batch_transform(const DualProblem& prob, double lambda, long* evals) {
  TransformBatch batch;
  batch.values.reserve(prob.sample.size());
  for (const auto& z : prob.sample.points) {
    TransformResult t = c_transform(prob.fam, prob.theta, prob.cost, lambda, z, prob.inner);
    if (t.certificate == Certificate::LowerBound) batch.certificate = Certificate::LowerBound;
    batch.values.push_back(t.value);
    ++*evals;
  }
  return batch;
}

// Value of the dual objective as lambda -> 0+: each sample is attacked over
// its whole finite-cost set (the delta-ball for the hard cost, the full
// predictor domain otherwise).
double full_attack_value(const DualProblem& prob, bool mean) {
  const bool hard = prob.cost.penalty.family() == Penalty::Family::HardBall;
  double acc = mean ? 0.0 : -kInf;
  for (const auto& z : prob.sample.points) {
    const double v = hard
                         ? c_delta_transform(prob.fam, prob.theta, prob.cost.delta,
                                             prob.cost.norm, z)
                         : prob.fam.sup_loss_label(prob.theta, z.y);
    if (mean) acc += v / static_cast<double>(prob.sample.size());
    else acc = std::max(acc, v);
  }
  return acc;
}

void validate_problem(const DualProblem& prob) {
  if (prob.sample.points.empty()) throw std::invalid_argument("dual solver: empty sample");
  if (!(prob.r > 0.0)) throw std::invalid_argument("dual solver: radius must be > 0");
}

}  // namespace

LambdaFResult lambda_f(const std::vector<double>& weights, const std::vector<double>& phi,
                       const FDivergence& f, double nu_lo, double nu_hi, double tol) {
  if (weights.size() != phi.size() || phi.empty())
    throw std::invalid_argument("lambda_f: weights and phi must be non-empty and equal size");
  if (nu_lo > nu_hi) throw std::invalid_argument("lambda_f: empty nu domain");
  LambdaFResult res;
  if (nu_lo == nu_hi) {
    res.nu_opt = nu_lo;
    res.value = lambda_f_objective(weights, phi, f, nu_lo).v;
    res.evaluations = 1;
    return res;
  }
  auto obj = [&](double nu) { return lambda_f_objective(weights, phi, f, nu); };
  GoldenResult g = golden_section_min(obj, nu_lo, nu_hi,
                                      tol * (1.0 + nu_hi - nu_lo), 300);
  res.nu_opt = g.x;
  GuardedValue gv = obj(g.x);
  if (gv.huge)
    throw std::runtime_error("lambda_f: objective overflows at the bracket midpoint");
  res.value = gv.v;
  res.evaluations = g.evaluations + 1;
  return res;
}

DualSolution ot_dro_dual(const DualProblem& prob) {
  validate_problem(prob);
  if (prob.divergence)
    throw std::invalid_argument("ot_dro_dual: divergence must be absent");

  DualSolution sol;
  const std::size_t n = prob.sample.size();

  // The hard cost makes L^c_lambda independent of lambda: the dual value is
  // the lambda -> 0+ limit, the mean of the ball-constrained transforms.
  if (prob.cost.penalty.family() == Penalty::Family::HardBall) {
    sol.value = full_attack_value(prob, /*mean=*/true);
    sol.lambda_opt = 0.0;
    sol.lambda_at_boundary = true;
    sol.evaluations = static_cast<long>(n);
    sol.certificate = Certificate::Exact;
    return sol;
  }

  long evals = 0;
  bool any_lower_bound = false;
  auto g = [&](double lambda) {
    TransformBatch b = batch_transform(prob, lambda, &evals);
    if (b.certificate == Certificate::LowerBound) any_lower_bound = true;
    double mean = 0.0;
    for (double v : b.values) mean += v;
    mean /= static_cast<double>(n);
    return lambda * prob.r + mean;
  };
  OuterResult outer = minimize_over_lambda(g, full_attack_value(prob, true), prob.outer_tol);
  sol.value = outer.value;
  sol.lambda_opt = outer.lambda;
  sol.lambda_at_boundary = outer.at_boundary;
  sol.evaluations = evals;
  sol.certificate = any_lower_bound ? Certificate::LowerBound : Certificate::Exact;
  return sol;
}

namespace {

// Shared core of the two OT-regularized duals; `inner_value` maps the batch of
// transform values at a given lambda to lambda * Lambda_f[L^c/lambda], also
// reporting the minimizing nu if it has one.
DualSolution otreg_dual_core(
    const DualProblem& prob,
    const std::function<double(double, const std::vector<double>&, double*)>& inner_value) {
  validate_problem(prob);
  if (!prob.divergence) throw std::invalid_argument("otreg dual: divergence required");
  for (const auto& z : prob.sample.points)
    if (z.y != 1 && z.y != -1)
      throw std::invalid_argument("otreg dual: classification labels required");

  long evals = 0;
  bool any_lower_bound = false;
  double nu_at_best = 0.0;
  auto g = [&](double lambda) {
    TransformBatch b = batch_transform(prob, lambda, &evals);
    if (b.certificate == Certificate::LowerBound) any_lower_bound = true;
    double nu = 0.0;
    const double val = lambda * prob.r + inner_value(lambda, b.values, &nu);
    nu_at_best = nu;
    return val;
  };
  OuterResult outer = minimize_over_lambda(g, full_attack_value(prob, /*mean=*/false),
                                           prob.outer_tol);
  DualSolution sol;
  sol.value = outer.value;
  sol.lambda_opt = outer.lambda;
  sol.lambda_at_boundary = outer.at_boundary;
  if (!outer.at_boundary) {
    // Re-evaluate at the returned lambda so nu matches it.
    g(outer.lambda);
    sol.nu_opt = nu_at_best;
    sol.rho_opt = outer.lambda * nu_at_best;
  }
  sol.evaluations = evals;
  sol.certificate = any_lower_bound ? Certificate::LowerBound : Certificate::Exact;
  return sol;
}

}  // namespace

DualSolution otreg_fdiv_dual(const DualProblem& prob) {
  const FDivergence& f = *prob.divergence;
  const double s0 = f.s0();
  auto inner = [&](double lambda, const std::vector<double>& values, double* nu_out) {
    std::vector<double> phi(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) phi[i] = values[i] / lambda;
    const double lo = *std::min_element(phi.begin(), phi.end()) - s0;
    const double hi = *std::max_element(phi.begin(), phi.end()) - s0;
    std::vector<double> w(values.size(), 1.0 / static_cast<double>(values.size()));
    LambdaFResult lf = lambda_f(w, phi, f, lo, hi, 1e-11);
    *nu_out = lf.nu_opt;
    return lambda * lf.value;
  };
  return otreg_dual_core(prob, inner);
}

DualSolution kl_dro_dual(const DualProblem& prob) {
  if (!prob.divergence || prob.divergence->family() != FDivergence::Family::KL)
    throw std::invalid_argument("kl_dro_dual: divergence must be KL");
  auto inner = [&](double lambda, const std::vector<double>& values, double* nu_out) {
    // lambda * log E[exp(L^c/lambda)] via a stable log-sum-exp.
    std::vector<double> terms(values.size());
    const double logw = -std::log(static_cast<double>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] / lambda + logw;
    const double lme = logsumexp(terms);
    *nu_out = lme - 1.0;  // minimizing nu of the inner problem
    return lambda * lme;
  };
  return otreg_dual_core(prob, inner);
}

namespace {

double dual_value_for_theta(const DualProblem& prob, const std::vector<double>& theta,
                            long* evals) {
  DualProblem p = prob;
  p.theta = theta;
  DualSolution s;
  if (!p.divergence) s = ot_dro_dual(p);
  else if (p.divergence->family() == FDivergence::Family::KL) s = kl_dro_dual(p);
  else s = otreg_fdiv_dual(p);
  *evals += s.evaluations;
  return s.value;
}

std::vector<std::vector<double>> ball_grid(int k, int per_axis) {
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(k, 0);
  while (true) {
    std::vector<double> p(k);
    for (int j = 0; j < k; ++j)
      p[j] = per_axis == 1 ? 0.0 : -1.0 + 2.0 * idx[j] / static_cast<double>(per_axis - 1);
    double nrm = 0.0;
    for (double c : p) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm > 1.0)
      for (double& c : p) c /= nrm;  // project outside points onto the sphere
    pts.push_back(p);
    int j = 0;
    while (j < k && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == k) break;
  }
  return pts;
}

std::vector<double> random_ball_point(SplitMix64& rng, int k) {
  std::vector<double> p(k);
  double nrm = 0.0;
  for (auto& c : p) {
    c = rng.normal();
    nrm += c * c;
  }
  nrm = std::sqrt(nrm);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
  for (auto& c : p) c = nrm > 0.0 ? c / nrm * radius : 0.0;
  return p;
}

}  // namespace

ErmResult erm_minimize(const DualProblem& prob, ErmSearch search, int budget) {
  const int k = prob.fam.param_dim();
  if (budget < 4) throw std::invalid_argument("erm_minimize: budget too small");
  ErmResult res;
  long evals = 0;
  auto value = [&](const std::vector<double>& th) {
    return dual_value_for_theta(prob, th, &evals);
  };

  std::vector<double> best_theta(k, 0.0);
  double best = value(best_theta);
  auto consider = [&](const std::vector<double>& th) {
    const double v = value(th);
    if (v < best) {
      best = v;
      best_theta = th;
    }
  };

  if (search == ErmSearch::Grid) {
    if (k > 4) throw std::invalid_argument("erm_minimize: grid search requires k <= 4");
    int per_axis = std::max(3, static_cast<int>(std::floor(
                                   std::pow(static_cast<double>(budget), 1.0 / k))));
    if (per_axis % 2 == 0) --per_axis;
    for (const auto& th : ball_grid(k, per_axis)) consider(th);
    // Refinement: a local grid at half step around the incumbent.
    const double coarse_best = best;
    const double step = 2.0 / static_cast<double>(per_axis - 1);
    std::vector<double> center = best_theta;
    for (const auto& off : ball_grid(k, 3)) {
      std::vector<double> th(k);
      double nrm = 0.0;
      for (int j = 0; j < k; ++j) {
        th[j] = center[j] + 0.5 * step * off[j];
        nrm += th[j] * th[j];
      }
      nrm = std::sqrt(nrm);
      if (nrm > 1.0)
        for (auto& c : th) c /= nrm;
      consider(th);
    }
    res.eps_opt = coarse_best - best;
  } else if (search == ErmSearch::RandomSearch) {
    SplitMix64 rng = SplitMix64::substream(0xe51cULL, 1);
    const int n_coarse = (3 * budget) / 4;
    for (int i = 0; i < n_coarse; ++i) consider(random_ball_point(rng, k));
    const double coarse_best = best;
    for (int i = 0; i < budget - n_coarse; ++i) {
      std::vector<double> th = best_theta;
      double nrm = 0.0;
      for (auto& c : th) {
        c += 0.1 * rng.normal();
        nrm += c * c;
      }
      nrm = std::sqrt(nrm);
      if (nrm > 1.0)
        for (auto& c : th) c /= nrm;
      consider(th);
    }
    res.eps_opt = coarse_best - best;
  } else {
    // Projected subgradient on finite-difference gradients.
    std::vector<double> th = best_theta;
    const double fd = 1e-4;
    const int iters = std::max(1, budget / (2 * k + 1));
    for (int it = 0; it < iters; ++it) {
      const double v0 = value(th);
      std::vector<double> grad(k);
      for (int j = 0; j < k; ++j) {
        std::vector<double> tp = th;
        tp[j] += fd;
        double nrm = 0.0;
        for (double c : tp) nrm += c * c;
        if (nrm > 1.0) tp[j] -= 2.0 * fd;
        grad[j] = (value(tp) - v0) / (tp[j] - th[j]);
      }
      const double step = 0.3 / std::sqrt(static_cast<double>(it + 1));
      double nrm = 0.0;
      for (int j = 0; j < k; ++j) {
        th[j] -= step * grad[j];
        nrm += th[j] * th[j];
      }
      nrm = std::sqrt(nrm);
      if (nrm > 1.0)
        for (auto& c : th) c /= nrm;
      consider(th);
    }
    const double coarse_best = best;
    // Shrinking local polish around the incumbent.
    SplitMix64 rng = SplitMix64::substream(0xe51cULL, 2);
    for (int i = 0; i < std::max(8, budget / 8); ++i) {
      std::vector<double> tp = best_theta;
      double nrm = 0.0;
      for (auto& c : tp) {
        c += 0.02 * rng.normal();
        nrm += c * c;
      }
      nrm = std::sqrt(nrm);
      if (nrm > 1.0)
        for (auto& c : tp) c /= nrm;
      consider(tp);
    }
    res.eps_opt = coarse_best - best;
  }

  res.theta = best_theta;
  res.value = best;
  res.evaluations = evals;
  res.certificate = Certificate::LowerBound;  // optimality gap is an estimate
  return res;
}

LambdaLimitReport lambda_limit_check(const DualProblem& prob,
                                     const std::vector<double>& lambda_grid) {
  if (!prob.divergence) throw std::invalid_argument("lambda_limit_check: divergence required");
  const FDivergence& f = *prob.divergence;
  const double beta = prob.fam.beta();
  const double s0 = f.s0();
  const double L_X = prob.fam.L_X();
  const std::size_t n = prob.sample.size();

  double mean_delta = 0.0;
  for (const auto& z : prob.sample.points)
    mean_delta +=
        c_delta_transform(prob.fam, prob.theta, prob.cost.delta, prob.cost.norm, z) /
        static_cast<double>(n);

  LambdaLimitReport report;
  long evals = 0;
  for (double lambda : lambda_grid) {
    TransformBatch b = batch_transform(prob, lambda, &evals);
    std::vector<double> phi(b.values.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = b.values[i] / lambda;
    const double lo = *std::min_element(phi.begin(), phi.end()) - s0;
    const double hi = *std::max_element(phi.begin(), phi.end()) - s0;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const double lam_f = lambda * lambda_f(w, phi, f, lo, hi, 1e-11).value;

    LambdaLimitRow row;
    row.lambda = lambda;
    row.actual = std::fabs(lam_f - mean_delta);
    row.bound = lambda * prob.cost.penalty.psi_star(L_X / lambda) +
                beta * (f.f_star_rderiv(beta / lambda + s0) - f.f_star_rderiv(s0));
    row.ok = row.actual <= row.bound + 1e-8;
    if (!row.ok) report.all_ok = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace otdro
