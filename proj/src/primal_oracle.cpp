#include "otdro/primal_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otdro/rng.hpp"
#include "otdro/simplex.hpp"

namespace otdro {

void FiniteInstance::validate() const {
  if (candidates.empty()) throw std::invalid_argument("FiniteInstance: no sources");
  if (self_index.size() != candidates.size())
    throw std::invalid_argument("FiniteInstance: self_index size mismatch");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].empty()) throw std::invalid_argument("FiniteInstance: empty candidate list");
    const int si = self_index[i];
    if (si < 0 || si >= static_cast<int>(candidates[i].size()))
      throw std::invalid_argument("FiniteInstance: bad self index");
    if (std::fabs(candidates[i][si].cost) > 1e-12)
      throw std::invalid_argument("FiniteInstance: source must have cost 0 to itself");
    for (const auto& c : candidates[i])
      if (c.cost < 0.0 || !std::isfinite(c.cost))
        throw std::invalid_argument("FiniteInstance: costs must be finite and >= 0");
  }
}

FiniteInstance make_finite_instance(
    const ObjectiveFamily& fam, const std::vector<double>& theta, const TransportCost& cost,
    const Dataset& sample, int grid_per_source, double max_radius,
    const std::vector<std::vector<std::vector<double>>>& extra_candidates) {
  FiniteInstance inst;
  const auto box = fam.box_b();
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    const Point& z = sample.points[i];
    std::vector<FiniteInstance::Candidate> list;

    auto add_point = [&](std::vector<double> x) {
      if (box)
        for (auto& c : x) c = std::clamp(c, -*box, *box);
      const ExtReal ce = cost.cost(z, Point{x, z.y});
      if (!ce.is_finite()) return;  // prune infinite-cost candidates
      FiniteInstance::Candidate cand;
      cand.loss = fam.loss(theta, Point{x, z.y});
      cand.cost = ce.value();
      cand.x = std::move(x);
      list.push_back(std::move(cand));
    };

    inst.self_index.push_back(0);
    add_point(z.x);  // the source itself, cost 0
    list.back().cost = 0.0;

    // Attack-ray points carry the mass in the optimal couplings of the
    // shipped families.
    if (grid_per_source > 0 && max_radius > 0.0) {
      for (int gidx = 1; gidx <= grid_per_source; ++gidx) {
        const double t = max_radius * static_cast<double>(gidx) / grid_per_source;
        add_point(attack_point(fam, theta, cost.norm, z, t));
      }
    }
    if (i < extra_candidates.size())
      for (const auto& x : extra_candidates[i]) add_point(x);

    inst.candidates.push_back(std::move(list));
  }
  inst.validate();
  return inst;
}

double ot_primal_lp(const FiniteInstance& inst, double r) {
  inst.validate();
  if (r < 0.0) throw std::invalid_argument("ot_primal_lp: r must be >= 0");
  const std::size_t n = inst.n_sources();

  // Variables: pi_{ij} flattened, then one slack for the budget row.
  std::vector<std::size_t> offset(n, 0);
  std::size_t nv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    offset[i] = nv;
    nv += inst.candidates[i].size();
  }
  const std::size_t slack = nv;
  ++nv;

  const std::size_t rows = n + 1;
  std::vector<std::vector<double>> A(rows, std::vector<double>(nv, 0.0));
  std::vector<double> b(rows, 0.0);
  std::vector<double> c(nv, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < inst.candidates[i].size(); ++j) {
      A[i][offset[i] + j] = 1.0;                        // row mass = 1/n
      A[n][offset[i] + j] = inst.candidates[i][j].cost;  // budget row
      c[offset[i] + j] = inst.candidates[i][j].loss;
    }
    b[i] = 1.0 / static_cast<double>(n);
  }
  A[n][slack] = 1.0;
  b[n] = r;

  // Identity coupling plus the slack is a basic feasible start.
  std::vector<int> basis;
  for (std::size_t i = 0; i < n; ++i)
    basis.push_back(static_cast<int>(offset[i] + inst.self_index[i]));
  basis.push_back(static_cast<int>(slack));

  SimplexResult res = simplex_max(A, b, c, basis);
  if (res.status != SimplexResult::Status::Optimal)
    throw std::runtime_error("ot_primal_lp: simplex did not reach optimality");
  return res.value;
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = -1;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i);
      theta = t;
    }
  }
  if (rho < 0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return;
  }
  for (auto& x : v) x = std::max(x - theta, 0.0);
}

double f_prime(const FDivergence& f, double t) {
  if (f.family() == FDivergence::Family::KL) return std::log(std::max(t, 1e-300)) + 1.0;
  const double a = f.alpha_param();
  return std::pow(std::max(t, 0.0), a - 1.0) / (a - 1.0);
}

}  // namespace

OtRegPrimalResult otreg_primal_convex(const FiniteInstance& inst, const FDivergence& f,
                                      double r, const OtRegPrimalConfig& cfg) {
  inst.validate();
  if (r < 0.0) throw std::invalid_argument("otreg_primal_convex: r must be >= 0");
  const std::size_t n = inst.n_sources();
  const double wn = 1.0 / static_cast<double>(n);

  std::vector<std::size_t> offset(n, 0);
  std::size_t nv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    offset[i] = nv;
    nv += inst.candidates[i].size();
  }

  auto row_sums = [&](const std::vector<double>& pi, std::vector<double>& eta) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < inst.candidates[i].size(); ++j) s += pi[offset[i] + j];
      eta[i] = s;
    }
  };
  auto objective = [&](const std::vector<double>& pi) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < inst.candidates[i].size(); ++j)
        v += pi[offset[i] + j] * inst.candidates[i][j].loss;
    return v;
  };
  // Constraint G(pi) = D_f(eta || P_n) + transport cost - r  (must be <= 0).
  auto constraint = [&](const std::vector<double>& pi, std::vector<double>& eta) {
    row_sums(pi, eta);
    double div = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      div += wn * f.f(eta[i] / wn).value();
    double tc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < inst.candidates[i].size(); ++j)
        tc += pi[offset[i] + j] * inst.candidates[i][j].cost;
    return div + tc - r;
  };

  // Feasible start: identity coupling (eta = P_n, zero transport).
  std::vector<double> pi(nv, 0.0);
  for (std::size_t i = 0; i < n; ++i) pi[offset[i] + inst.self_index[i]] = wn;
  std::vector<double> eta(n, 0.0);

  OtRegPrimalResult out;
  out.value = objective(pi);
  std::vector<double> best_pi = pi;

  std::vector<double> grad(nv, 0.0);
  for (double mu : cfg.mu_schedule) {
    pi = best_pi;
    double step = cfg.step0;
    for (int phase = 0; phase < cfg.phases; ++phase, step *= 0.5) {
      for (int it = 0; it < cfg.iters_per_phase; ++it) {
        const double G = constraint(pi, eta);
        const bool violated = G > 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double fp = violated ? f_prime(f, eta[i] / wn) : 0.0;
          for (std::size_t j = 0; j < inst.candidates[i].size(); ++j) {
            double gij = inst.candidates[i][j].loss;
            if (violated) gij -= mu * (fp + inst.candidates[i][j].cost);
            grad[offset[i] + j] = gij;
          }
        }
        double gn = 0.0;
        for (double gv : grad) gn += gv * gv;
        gn = std::sqrt(gn);
        if (gn < 1e-15) break;
        const double s = step / gn / std::sqrt(static_cast<double>(it + 1));
        for (std::size_t k = 0; k < nv; ++k) pi[k] += s * grad[k];
        project_simplex(pi);
        ++out.iterations;

        if (constraint(pi, eta) <= 1e-12) {
          const double v = objective(pi);
          if (v > out.value) {
            out.value = v;
            best_pi = pi;
          }
        }
      }
      pi = best_pi;
    }
  }
  out.final_violation = std::max(constraint(best_pi, eta), 0.0);
  out.converged = out.final_violation <= 1e-9;
  return out;
}

DualityReport weak_duality_check(double primal, double dual, Certificate dual_certificate,
                                 double tol) {
  DualityReport rep;
  rep.primal = primal;
  rep.dual = dual;
  rep.gap = dual - primal;
  if (primal > dual + tol) {
    rep.ok = false;
    rep.message = "primal exceeds dual beyond tolerance";
    return rep;
  }
  if (dual_certificate == Certificate::Exact && dual > primal + tol) {
    rep.ok = false;
    rep.message = "exact dual exceeds primal beyond tolerance";
    return rep;
  }
  rep.ok = true;
  rep.message = "ok";
  return rep;
}

}  // namespace otdro
