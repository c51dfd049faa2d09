#include "otdro/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otdro/quadrature.hpp"
#include "otdro/rng.hpp"

namespace otdro {

namespace {

// log(ceil(x) + 1) for x >= 0, stable for huge x.
double log_ceil_plus_1(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 9e15) return std::log(x);
  return std::log(std::ceil(x) + 1.0);
}

// log(ceil(x)) for x > 0 (ceil >= 1 so the result is >= 0).
double log_ceil(double x) {
  if (x <= 1.0) return 0.0;
  if (x >= 9e15) return std::log(x);
  return std::log(std::ceil(x));
}

// Default two-way split: the minimizer of the closed-form bound
// A/(1-gamma) + B/gamma where it is derived; 1 when the penalty contributes
// nothing (hard ball or M = 0).
double default_gamma(const ObjectiveFamily& fam, const TransportCost& cost) {
  const double beta = fam.beta();
  const double k = fam.param_dim();
  const double B = 2.0 * k * fam.L_Theta() / beta;
  const double L_X = fam.L_X();
  const Penalty& p = cost.penalty;
  if (p.family() == Penalty::Family::HardBall || cost.M == 0.0) return 1.0;
  double A;
  switch (p.family()) {
    case Penalty::Family::PowerLaw: {
      const double q = p.q();
      A = q * (cost.M * std::pow(L_X / q, q) * std::pow(q - 1.0, q - 1.0) /
                   (2.0 * p.alpha() * std::pow(beta, q)) +
               1.0);
      break;
    }
    case Penalty::Family::PowerPlusLinear:
      A = cost.M * L_X / (2.0 * p.eta() * beta);
      break;
    case Penalty::Family::Exponential:
      A = cost.M * L_X / (2.0 * p.alpha() * p.q() * beta);
      break;
    default:
      A = 1.0;
  }
  if (A <= 0.0) return 1.0;
  return std::sqrt(B) / (std::sqrt(A) + std::sqrt(B));
}

double entropy_integral(const std::function<double(double)>& integrand, double upper,
                        int points) {
  const double e0 = upper / 2048.0;
  return sqrt_substitution_panel(integrand, e0, 64) +
         gauss_legendre(integrand, e0, upper, points);
}

}  // namespace

double LambdaNRule::lambda_n(double n) const { return C * std::pow(n, exponent); }

double log_covering_bound_gc(const ObjectiveFamily& fam, const TransportCost& cost,
                             double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0))
    throw std::invalid_argument("log_covering_bound_gc: eps1, eps2 must be > 0");
  const double lam_star = cost.penalty.lambda_star(eps2, fam.L_X());
  return log_ceil_plus_1(cost.M * lam_star / (2.0 * eps2)) +
         fam.log_covering_number_bound(eps1);
}

double dn_bound(const ObjectiveFamily& fam, const TransportCost& cost, double n,
                const BoundConfig& cfg) {
  if (n < 1.0) throw std::invalid_argument("dn_bound: n must be >= 1");
  const double beta = fam.beta();
  const double gamma = cfg.split_gamma ? *cfg.split_gamma : default_gamma(fam, cost);
  const bool no_lambda_term =
      cost.penalty.family() == Penalty::Family::HardBall || cost.M == 0.0 || gamma >= 1.0;
  auto integrand = [&](double e) {
    double lg = fam.log_covering_number_bound(no_lambda_term ? e : gamma * e);
    if (!no_lambda_term) {
      const double h2 = (1.0 - gamma) * e;
      const double lam_star = cost.penalty.lambda_star(h2, fam.L_X());
      lg += log_ceil_plus_1(cost.M * lam_star / (2.0 * h2));
    }
    return std::sqrt(lg);
  };
  return 12.0 / std::sqrt(n) * entropy_integral(integrand, beta, cfg.integration_points);
}

double dn_closed_form(const ObjectiveFamily& fam, const TransportCost& cost, double n) {
  const double beta = fam.beta();
  const double k = fam.param_dim();
  const double LT = fam.L_Theta();
  const double L_X = fam.L_X();
  const double pref = 24.0 / std::sqrt(n);
  const Penalty& p = cost.penalty;
  switch (p.family()) {
    case Penalty::Family::HardBall:
      return pref * std::sqrt(2.0 * LT * beta * k);
    case Penalty::Family::PowerLaw: {
      const double q = p.q();
      const double inner = cost.M * std::pow(L_X / q, q) * std::pow(q - 1.0, q - 1.0) /
                               (2.0 * p.alpha() * std::pow(beta, q)) +
                           1.0;
      return pref * beta * (std::sqrt(q) * std::sqrt(inner) + std::sqrt(2.0 * k * LT / beta));
    }
    case Penalty::Family::PowerPlusLinear:
    case Penalty::Family::Exponential: {
      const double eta =
          p.family() == Penalty::Family::PowerPlusLinear ? p.eta() : p.alpha() * p.q();
      return pref * beta *
             std::sqrt(1.0 + cost.M * L_X / (2.0 * eta * beta) + 2.0 * k * LT / beta +
                       2.0 / beta * std::sqrt(k * cost.M * L_X * LT / eta));
    }
  }
  throw std::logic_error("dn_closed_form: unreachable");
}

double rn_bound(const ObjectiveFamily& fam, const TransportCost& cost, const FDivergence& f,
                double n, const BoundConfig& cfg) {
  const double beta = fam.beta();
  const double lam_n = cfg.lambda_n_rule.lambda_n(n);
  const double s0 = f.s0();
  const double penalty_term = 2.0 * lam_n * cost.penalty.psi_star(fam.L_X() / lam_n);
  const double curvature_term =
      2.0 * beta * (f.f_star_rderiv(beta / lam_n + s0) - f.f_star_rderiv(s0));
  auto integrand = [&](double e) { return std::sqrt(fam.log_covering_number_bound(e)); };
  const double entropy =
      24.0 / std::sqrt(n) * entropy_integral(integrand, beta, cfg.integration_points);
  return penalty_term + curvature_term + entropy;
}

double g_class_lambda_constant(const FDivergence& f, const DivergenceConstants& consts) {
  return f.f_star(-consts.nu_tilde) - f.inf_f_star() + consts.tail_sup +
         consts.C2 * (std::max(-f.s0(), -consts.nu_tilde) + consts.M);
}

double rn_tilde_bound(const ObjectiveFamily& fam, const TransportCost& cost,
                      const FDivergence& f, double n, const BoundConfig& cfg,
                      const DivergenceConstants& consts) {
  (void)cost;
  const double s0 = f.s0();
  if (!(consts.nu_tilde < -s0))
    throw std::invalid_argument("rn_tilde_bound: need nu_tilde < -s0");
  const double C2 = consts.C2;
  const double C1 = g_class_lambda_constant(f, consts);
  const double lam_n = cfg.lambda_n_rule.lambda_n(n);
  const double width = -s0 - consts.nu_tilde;
  const auto& g3 = cfg.split3;
  if (!(g3[0] > 0.0 && g3[1] > 0.0 && g3[2] > 0.0) ||
      std::fabs(g3[0] + g3[1] + g3[2] - 1.0) > 1e-9)
    throw std::invalid_argument("rn_tilde_bound: three-way split must be positive, sum 1");
  auto integrand = [&](double e) {
    const double lg = log_ceil(lam_n * C1 / (2.0 * g3[0] * e)) +
                      log_ceil(width * lam_n * C2 / (g3[1] * e)) +
                      fam.log_covering_number_bound(g3[2] * e / C2);
    return std::sqrt(lg);
  };
  return 24.0 / std::sqrt(n) *
         entropy_integral(integrand, fam.beta() * C2, cfg.integration_points);
}

TailResult tail_probability(Theorem thm, double n, double eps, const TailConstants& c) {
  if (eps < 0.0) throw std::invalid_argument("tail_probability: eps must be >= 0");
  double v = 0.0;
  const double b2 = c.beta * c.beta;
  switch (thm) {
    case Theorem::OtValues:
      v = std::exp(-2.0 * eps * eps * n / b2);
      break;
    case Theorem::OtErm:
      v = std::exp(-eps * eps * n / (2.0 * b2)) + c.delta_opt;
      break;
    case Theorem::OtRegValues: {
      const double bc = c.beta * c.C2;
      double class_tail = 0.0;
      for (double py : c.p_y) class_tail += std::exp(-2.0 * n * (py - c.p0) * (py - c.p0));
      v = std::exp(-2.0 * n * eps * eps / b2) + std::exp(-2.0 * n * eps * eps / (bc * bc)) +
          class_tail;
      break;
    }
    case Theorem::OtRegErm: {
      const double bc = c.beta * c.C2;
      double class_tail = 0.0;
      for (double py : c.p_y) class_tail += std::exp(-2.0 * n * (py - c.p0) * (py - c.p0));
      v = c.delta_opt + 2.0 * std::exp(-n * eps * eps / (2.0 * b2)) +
          2.0 * std::exp(-n * eps * eps / (2.0 * bc * bc)) + 2.0 * class_tail;
      break;
    }
  }
  TailResult res;
  res.clamped = v > 1.0;
  res.value = res.clamped ? 1.0 : v;
  return res;
}

BoundReport compute_bound_report(const ObjectiveFamily& fam, const TransportCost& cost,
                                 const FDivergence& f, double n, const BoundConfig& cfg,
                                 const std::vector<double>& p_y,
                                 const std::vector<double>& eps_grid) {
  BoundReport rep;
  rep.consts = f.constants(cfg.p0, cost.M);
  rep.D_n = dn_bound(fam, cost, n, cfg);
  rep.R_n = rn_bound(fam, cost, f, n, cfg);
  rep.R_n_tilde = rn_tilde_bound(fam, cost, f, n, cfg, rep.consts);
  rep.C1 = g_class_lambda_constant(f, rep.consts);
  rep.C2 = rep.consts.C2;
  rep.lambda_n = cfg.lambda_n_rule.lambda_n(n);
  rep.beta = fam.beta();
  rep.L_X = fam.L_X();
  rep.L_Theta = fam.L_Theta();
  rep.M = cost.M;
  rep.k = fam.param_dim();
  TailConstants tc;
  tc.beta = fam.beta();
  tc.C2 = rep.C2;
  tc.p_y = p_y;
  tc.p0 = cfg.p0;
  for (double eps : eps_grid)
    rep.value_tails.emplace_back(eps, tail_probability(Theorem::OtRegValues, n, eps, tc));
  return rep;
}

GBoundsReport g_function_bounds_check(const ObjectiveFamily& fam, const TransportCost& cost,
                                      const FDivergence& f, const DivergenceConstants& consts,
                                      double lambda_n, const Dataset& sample,
                                      const InnerSolverConfig& inner, const GBoundsConfig& cfg) {
  GBoundsReport rep;
  rep.tuples = cfg.tuples;
  const double s0 = f.s0();
  const double beta = fam.beta();
  const double C2 = consts.C2;
  const double C1 = g_class_lambda_constant(f, consts);
  const int k = fam.param_dim();
  SplitMix64 rng = SplitMix64::substream(cfg.seed, 0x9b0dULL);

  auto random_theta = [&]() {
    std::vector<double> th(k);
    double nrm = 0.0;
    for (auto& c : th) {
      c = rng.normal();
      nrm += c * c;
    }
    nrm = std::sqrt(nrm);
    const double rad = std::pow(rng.uniform(), 1.0 / k);
    for (auto& c : th) c = nrm > 0.0 ? c / nrm * rad : 0.0;
    return th;
  };
  auto g_value = [&](const std::vector<double>& th, double lambda, double nu, const Point& z) {
    const double sup_global = fam.sup_loss_global(th);
    const double lc = c_transform(fam, th, cost, lambda, z, inner).value;
    const double delta_lc = sup_global - lc;
    return lambda * (f.f_star(-nu) - f.f_star(-delta_lc / lambda - nu));
  };
  auto fail = [&](const std::string& which, double lhs, double rhs, double lambda, double nu) {
    rep.failures.push_back({which, lhs, rhs, lambda, nu});
    rep.ok = false;
  };

  for (int t = 0; t < cfg.tuples; ++t) {
    const std::vector<double> th1 = random_theta();
    const std::vector<double> th2 = random_theta();
    const double lambda = lambda_n * std::max(rng.uniform(), 1e-3);
    const double nu = consts.nu_tilde + (-s0 - consts.nu_tilde) * rng.uniform();
    const double nu2 = consts.nu_tilde + (-s0 - consts.nu_tilde) * rng.uniform();
    const Point& z = sample.points[rng.uniform_int(static_cast<int>(sample.size()))];

    const double g1 = g_value(th1, lambda, nu, z);
    if (g1 < -cfg.slack || g1 > beta * C2 + cfg.slack)
      fail("uniform", g1, beta * C2, lambda, nu);

    // theta-Lipschitz against a computable upper bound for the sup-norm
    // distance of the base losses.
    double dth = 0.0, l1 = 0.0;
    for (int j = 0; j < k; ++j) {
      dth += (th1[j] - th2[j]) * (th1[j] - th2[j]);
      l1 += std::fabs(th1[j] - th2[j]);
    }
    dth = std::sqrt(dth);
    const double sup_norm_bound =
        fam.box_b() ? std::min(beta, *fam.box_b() * l1) : beta;
    const double g2 = g_value(th2, lambda, nu, z);
    if (std::fabs(g1 - g2) > C2 * sup_norm_bound + cfg.slack)
      fail("theta_lipschitz", std::fabs(g1 - g2), C2 * sup_norm_bound, lambda, nu);

    const double g3 = g_value(th1, lambda, nu2, z);
    if (std::fabs(g1 - g3) > 2.0 * lambda_n * C2 * std::fabs(nu - nu2) + cfg.slack)
      fail("nu_lipschitz", std::fabs(g1 - g3), 2.0 * lambda_n * C2 * std::fabs(nu - nu2),
           lambda, nu);

    // lambda-derivative by central differences at a generic lambda.
    const double h = 1e-5 * std::max(lambda, 0.1);
    if (lambda - h > 0.0) {
      const double gp = g_value(th1, lambda + h, nu, z);
      const double gm = g_value(th1, lambda - h, nu, z);
      const double slope = std::fabs(gp - gm) / (2.0 * h);
      if (slope > C1 + 1e-3 * C1 + cfg.slack)
        fail("lambda_derivative", slope, C1, lambda, nu);
    }
  }
  return rep;
}

}  // namespace otdro
