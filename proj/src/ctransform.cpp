#include "otdro/ctransform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otdro/golden_section.hpp"
#include "otdro/rng.hpp"

namespace otdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Steepest attack ray for margin-monotone losses: the minimum of the margin
// m = y <theta, x~> over all x~ within distance t of x (inside the box when
// one is configured), together with an attaining point.
//
// For the Linf norm (and for d == 1 under any norm) the minimization is
// coordinate-separable and exact for every t.  For L2 with a box in d > 1
// the minimum is computed through the exact ball/box linear maximizer.
class AttackRay {
 public:
  AttackRay(const ObjectiveFamily& fam, const std::vector<double>& theta, Norm norm,
            const Point& z)
      : theta_(theta), x_(z.x), y_(z.y), norm_(norm), box_(fam.box_b()) {
    m0_ = static_cast<double>(y_) * dot(theta_, x_);
    const std::size_t d = x_.size();
    separable_ = (norm_ == Norm::Linf) || d == 1 || !box_;
    if (!box_) {
      rho_ = norm_ == Norm::L2 ? l2(theta_) : l1(theta_);
      t_corner_ = rho_ > 0.0 ? kInf : 0.0;
    } else if (separable_) {
      // Each coordinate moves against y*theta_j until it hits the box wall.
      rho_ = 0.0;
      const double B = *box_;
      for (std::size_t j = 0; j < d; ++j) {
        const double w = static_cast<double>(y_) * theta_[j];
        if (w == 0.0) continue;
        rho_ += std::fabs(theta_[j]);
        const double tj = w > 0.0 ? x_[j] + B : B - x_[j];
        sat_.emplace_back(std::max(tj, 0.0), std::fabs(theta_[j]));
      }
      std::sort(sat_.begin(), sat_.end());
      t_corner_ = sat_.empty() ? 0.0 : sat_.back().first;
      if (norm_ == Norm::L2 && d == 1) rho_ = l1(theta_);  // same thing in 1-D
    } else {
      // L2 with a box, d > 1: linear ray until it exits the box.
      rho_ = l2(theta_);
      const double B = *box_;
      t_exit_ = kInf;
      if (rho_ > 0.0) {
        for (std::size_t j = 0; j < d; ++j) {
          const double u = -static_cast<double>(y_) * theta_[j] / rho_;
          if (u > 0.0) t_exit_ = std::min(t_exit_, (B - x_[j]) / u);
          else if (u < 0.0) t_exit_ = std::min(t_exit_, (x_[j] + B) / -u);
        }
        // Farthest reachable corner: beyond it the margin is constant.
        std::vector<double> corner(d);
        for (std::size_t j = 0; j < d; ++j)
          corner[j] = (static_cast<double>(y_) * theta_[j] > 0.0 ? -B : B) - x_[j];
        t_corner_ = l2(corner);
      } else {
        t_corner_ = 0.0;
      }
    }
  }

  double margin0() const { return m0_; }
  double slope0() const { return rho_; }
  // Time after which the margin no longer decreases.
  double t_corner() const { return t_corner_; }
  bool exact_everywhere() const { return separable_; }

  double margin(double t) const {
    if (t <= 0.0) return m0_;
    if (!box_) return m0_ - rho_ * t;
    if (separable_) {
      double m = 0.0;
      const double B = *box_;
      for (std::size_t j = 0; j < x_.size(); ++j) {
        const double w = static_cast<double>(y_) * theta_[j];
        double xj = x_[j];
        if (w > 0.0) xj = std::max(x_[j] - t, -B);
        else if (w < 0.0) xj = std::min(x_[j] + t, B);
        m += w * xj;
      }
      return m;
    }
    if (t <= t_exit_) return m0_ - rho_ * t;
    std::vector<double> w(theta_.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = -static_cast<double>(y_) * theta_[j];
    std::vector<double> lo(x_.size()), hi(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) {
      lo[j] = -*box_ - x_[j];
      hi[j] = *box_ - x_[j];
    }
    const double gain = max_linear_over_ball_box(w, t, lo, hi, nullptr);
    return m0_ - gain;
  }

  std::vector<double> point(double t) const {
    std::vector<double> p = x_;
    if (t <= 0.0) return p;
    if (!box_) {
      if (rho_ == 0.0) return p;
      if (norm_ == Norm::L2) {
        for (std::size_t j = 0; j < p.size(); ++j)
          p[j] -= t * static_cast<double>(y_) * theta_[j] / rho_;
      } else {
        for (std::size_t j = 0; j < p.size(); ++j) {
          const double w = static_cast<double>(y_) * theta_[j];
          if (w > 0.0) p[j] -= t;
          else if (w < 0.0) p[j] += t;
        }
      }
      return p;
    }
    if (separable_) {
      const double B = *box_;
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double w = static_cast<double>(y_) * theta_[j];
        if (w > 0.0) p[j] = std::max(x_[j] - t, -B);
        else if (w < 0.0) p[j] = std::min(x_[j] + t, B);
      }
      return p;
    }
    if (t <= t_exit_ && rho_ > 0.0) {
      for (std::size_t j = 0; j < p.size(); ++j)
        p[j] -= t * static_cast<double>(y_) * theta_[j] / rho_;
      return p;
    }
    std::vector<double> w(theta_.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = -static_cast<double>(y_) * theta_[j];
    std::vector<double> lo(x_.size()), hi(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) {
      lo[j] = -*box_ - x_[j];
      hi[j] = *box_ - x_[j];
    }
    std::vector<double> u;
    max_linear_over_ball_box(w, t, lo, hi, &u);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = x_[j] + u[j];
    return p;
  }

 private:
  std::vector<double> theta_;
  std::vector<double> x_;
  int y_;
  Norm norm_;
  std::optional<double> box_;
  double m0_ = 0.0;
  double rho_ = 0.0;
  bool separable_ = true;
  std::vector<std::pair<double, double>> sat_;
  double t_corner_ = kInf;
  double t_exit_ = kInf;
};

// Loss along the ray as a function of the attack budget t.
double ray_loss(const ObjectiveFamily& fam, const AttackRay& ray, double t) {
  const double m = ray.margin(t);
  if (fam.kind() == ObjectiveFamily::Kind::ClampedLinearMargin)
    return std::clamp(fam.beta() / 2.0 - m, 0.0, fam.beta());
  return fam.beta() * sigmoid(-fam.slope() * m);
}

// First t at which the (non-decreasing, continuous) ray margin drop reaches
// `target`, i.e. margin(t) <= target; +inf if unreachable.
double time_margin_below(const AttackRay& ray, double target, double t_hi) {
  if (ray.margin(0.0) <= target) return 0.0;
  if (ray.margin(t_hi) > target) return kInf;
  double a = 0.0, b = t_hi;
  for (int i = 0; i < 100 && (b - a) > 1e-14 * (1.0 + b); ++i) {
    const double mid = 0.5 * (a + b);
    (ray.margin(mid) <= target ? b : a) = mid;
  }
  return 0.5 * (a + b);
}

struct RayProblem {
  const ObjectiveFamily* fam;
  const AttackRay* ray;
  const TransportCost* cost;
  double lambda;

  // value of the transform objective at budget t; -inf on infinite cost.
  double operator()(double t) const {
    const ExtReal c = cost->phi(t);
    if (!c.is_finite()) return -kInf;
    return ray_loss(*fam, *ray, t) - lambda * c.value();
  }
};

}  // namespace

double max_linear_over_ball_box(const std::vector<double>& w, double radius,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                std::vector<double>* argmax) {
  const std::size_t d = w.size();
  auto clamped = [&](double rho, std::vector<double>& u) {
    double nrm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      u[j] = std::clamp(w[j] / rho, lo[j], hi[j]);
      nrm2 += u[j] * u[j];
    }
    return std::sqrt(nrm2);
  };
  std::vector<double> u(d);
  // Corner reachable without the ball binding?
  double corner_norm = 0.0, corner_val = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double uj = w[j] > 0.0 ? hi[j] : (w[j] < 0.0 ? lo[j] : 0.0);
    corner_norm += uj * uj;
    corner_val += w[j] * uj;
    u[j] = uj;
  }
  corner_norm = std::sqrt(corner_norm);
  if (corner_norm <= radius) {
    if (argmax) *argmax = u;
    return corner_val;
  }
  // ||u(rho)||_2 is non-increasing in rho; bisect to hit the radius.
  double rho_lo = 1e-12, rho_hi = 1.0;
  while (clamped(rho_hi, u) > radius) rho_hi *= 2.0;
  while (clamped(rho_lo, u) < radius && rho_lo > 1e-300) rho_lo *= 0.5;
  for (int i = 0; i < 200 && (rho_hi - rho_lo) > 1e-15 * rho_hi; ++i) {
    const double mid = 0.5 * (rho_lo + rho_hi);
    (clamped(mid, u) > radius ? rho_lo : rho_hi) = mid;
  }
  clamped(0.5 * (rho_lo + rho_hi), u);
  double val = 0.0;
  for (std::size_t j = 0; j < d; ++j) val += w[j] * u[j];
  if (argmax) *argmax = u;
  return val;
}

namespace {

// Exact maximization for the clamped-margin family: the ray objective is
// concave on [t0, t_end] where t0 is the time the loss leaves the zero floor,
// and non-increasing (= -lambda phi) on [0, t0].
TransformResult solve_clamped(const ObjectiveFamily& fam, const AttackRay& ray,
                              const TransportCost& cost, double lambda,
                              const InnerSolverConfig& cfg) {
  const double beta = fam.beta();
  RayProblem v{&fam, &ray, &cost, lambda};

  double t_end;
  const bool hard = cost.penalty.family() == Penalty::Family::HardBall;
  if (hard) {
    t_end = cost.delta;
  } else {
    // Beyond the clamp-at-beta time and the box corner the objective can
    // only decrease.
    double t_hi = ray.t_corner();
    if (ray.slope0() > 0.0) {
      double probe = std::max(cost.delta, 1.0);
      while (ray.margin(probe) > -beta / 2.0 && probe < 1e12 &&
             (!std::isfinite(t_hi) || probe < t_hi))
        probe *= 2.0;
      const double t_beta = time_margin_below(ray, -beta / 2.0, probe);
      t_hi = std::min(t_hi, t_beta);
    }
    if (!std::isfinite(t_hi)) t_hi = 0.0;  // constant margin
    t_end = std::max(cost.delta, t_hi);
  }

  const double t0 =
      std::min(time_margin_below(ray, beta / 2.0, std::max(t_end, 1e-12)), t_end);

  double best_t = 0.0;
  double best_v = v(0.0);
  auto consider = [&](double t) {
    if (t < 0.0 || t > t_end || !std::isfinite(t)) return;
    const double val = v(t);
    if (val > best_v) {
      best_v = val;
      best_t = t;
    }
  };
  consider(std::min(cost.delta, t_end));
  consider(t0);
  consider(t_end);
  if (std::isfinite(t0) && t0 < t_end) {
    GoldenResult g = golden_section_max_value(
        v, t0, t_end, cfg.tolerance * (1.0 + t_end - t0), 300);
    consider(g.x);
  }

  TransformResult res;
  res.value = best_v;
  res.argmax_x = ray.point(best_t);
  res.certificate = Certificate::Exact;
  return res;
}

TransformResult solve_logistic_grid(const ObjectiveFamily& fam, const AttackRay& ray,
                                    const TransportCost& cost, double lambda,
                                    const InnerSolverConfig& cfg) {
  RayProblem v{&fam, &ray, &cost, lambda};
  const bool hard = cost.penalty.family() == Penalty::Family::HardBall;
  double t_end;
  if (hard) {
    t_end = cost.delta;
  } else {
    // sigma saturates; past margin <= -40/slope gains are below 1e-17.
    double t_hi = ray.t_corner();
    if (ray.slope0() > 0.0) {
      double probe = std::max(cost.delta, 1.0);
      while (ray.margin(probe) > -40.0 / fam.slope() && probe < 1e12 &&
             (!std::isfinite(t_hi) || probe < t_hi))
        probe *= 2.0;
      t_hi = std::min(t_hi, time_margin_below(ray, -40.0 / fam.slope(), probe));
    }
    if (!std::isfinite(t_hi)) t_hi = 0.0;
    t_end = std::max(cost.delta, t_hi);
  }

  double best_t = 0.0, best_v = v(0.0);
  auto consider = [&](double t) {
    if (t < 0.0 || t > t_end || !std::isfinite(t)) return;
    const double val = v(t);
    if (val > best_v) {
      best_v = val;
      best_t = t;
    }
  };
  consider(std::min(cost.delta, t_end));
  consider(t_end);
  const int n = std::max(cfg.grid_points, 8);
  for (int i = 1; i < n; ++i) consider(t_end * static_cast<double>(i) / n);
  // Local polish around the best grid point.
  const double h = t_end / n;
  GoldenResult g = golden_section_max_value(v, std::max(0.0, best_t - h),
                                            std::min(t_end, best_t + h),
                                            cfg.tolerance * (1.0 + t_end), 200);
  consider(g.x);

  TransformResult res;
  res.value = best_v;
  res.argmax_x = ray.point(best_t);
  res.certificate = Certificate::LowerBound;
  return res;
}

TransformResult solve_multistart(const ObjectiveFamily& fam, const std::vector<double>& theta,
                                 const AttackRay& ray, const TransportCost& cost, double lambda,
                                 const Point& z, const InnerSolverConfig& cfg) {
  const bool hard = cost.penalty.family() == Penalty::Family::HardBall;
  const std::optional<double> box = fam.box_b();

  auto objective = [&](const std::vector<double>& xt) -> double {
    const double t = norm_dist(xt, z.x, cost.norm);
    const ExtReal c = cost.phi(t);
    if (!c.is_finite()) return -kInf;
    Point p{xt, z.y};
    return fam.loss(theta, p) - lambda * c.value();
  };
  auto penalty_slope = [&](double t) -> double {
    if (t < cost.delta) return 0.0;
    const double u = t - cost.delta;
    const Penalty& p = cost.penalty;
    switch (p.family()) {
      case Penalty::Family::PowerLaw: return p.alpha() * p.q() * std::pow(u, p.q() - 1.0);
      case Penalty::Family::PowerPlusLinear:
        return p.alpha() * p.q() * std::pow(u, p.q() - 1.0) + p.eta();
      case Penalty::Family::Exponential: return p.alpha() * p.q() * std::exp(p.q() * u);
      case Penalty::Family::HardBall: return 0.0;
    }
    return 0.0;
  };
  auto project = [&](std::vector<double>& xt) {
    if (hard) {
      // Stay strictly inside the delta-ball (a hair of shrink keeps rounding
      // from tipping the distance past delta): radial for L2, clamp for Linf.
      const double d_eff = cost.delta * (1.0 - 1e-12);
      if (cost.norm == Norm::L2) {
        std::vector<double> diff(xt.size());
        for (std::size_t j = 0; j < xt.size(); ++j) diff[j] = xt[j] - z.x[j];
        const double d = l2(diff);
        if (d > d_eff && d > 0.0) {
          for (std::size_t j = 0; j < xt.size(); ++j)
            xt[j] = z.x[j] + diff[j] * (d_eff / d);
        }
      } else {
        for (std::size_t j = 0; j < xt.size(); ++j)
          xt[j] = std::clamp(xt[j], z.x[j] - d_eff, z.x[j] + d_eff);
      }
    }
    if (box) {
      for (auto& c : xt) c = std::clamp(c, -*box, *box);
    }
  };

  // Seed points: the sample, ray points, random perturbations.
  std::vector<std::vector<double>> starts;
  starts.push_back(z.x);
  const double t_ref = hard ? cost.delta : std::min(ray.t_corner(), 10.0 * (1.0 + cost.delta));
  if (std::isfinite(t_ref) && t_ref > 0.0) {
    starts.push_back(ray.point(0.5 * t_ref));
    starts.push_back(ray.point(t_ref));
  }
  SplitMix64 rng = SplitMix64::substream(0xa77ac4ULL, static_cast<std::uint64_t>(z.y + 7));
  const double spread = std::isfinite(t_ref) && t_ref > 0.0 ? t_ref : 1.0;
  while (static_cast<int>(starts.size()) < std::max(cfg.restarts, 1) + 3) {
    std::vector<double> s = z.x;
    for (auto& c : s) c += spread * (2.0 * rng.uniform() - 1.0);
    starts.push_back(std::move(s));
  }

  double best_v = objective(z.x);
  std::vector<double> best_x = z.x;
  for (auto& x0 : starts) {
    std::vector<double> xt = x0;
    project(xt);
    for (int it = 0; it < cfg.steps; ++it) {
      Point p{xt, z.y};
      std::vector<double> g = fam.loss_grad_x(theta, p);
      const double t = norm_dist(xt, z.x, cost.norm);
      if (!hard && t > 0.0) {
        const double ps = lambda * penalty_slope(t);
        if (cost.norm == Norm::L2) {
          for (std::size_t j = 0; j < g.size(); ++j) g[j] -= ps * (xt[j] - z.x[j]) / t;
        } else {
          // Subgradient of the max-norm: concentrated on a max coordinate.
          std::size_t jmax = 0;
          for (std::size_t j = 1; j < xt.size(); ++j)
            if (std::fabs(xt[j] - z.x[j]) > std::fabs(xt[jmax] - z.x[jmax])) jmax = j;
          g[jmax] -= ps * (xt[jmax] >= z.x[jmax] ? 1.0 : -1.0);
        }
      }
      const double step = cfg.step_size / std::sqrt(static_cast<double>(it + 1));
      for (std::size_t j = 0; j < xt.size(); ++j) xt[j] += step * g[j];
      project(xt);
      const double val = objective(xt);
      if (val > best_v) {
        best_v = val;
        best_x = xt;
      }
    }
  }

  TransformResult res;
  res.value = best_v;
  res.argmax_x = best_x;
  res.certificate = Certificate::LowerBound;
  return res;
}

}  // namespace

TransformResult c_transform(const ObjectiveFamily& fam, const std::vector<double>& theta,
                            const TransportCost& cost, double lambda, const Point& z,
                            const InnerSolverConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("c_transform: lambda must be > 0");
  if (cost.norm != fam.x_norm())
    throw std::invalid_argument("c_transform: cost norm and family norm differ");
  AttackRay ray(fam, theta, cost.norm, z);
  if (cfg.strategy == InnerSolverConfig::Strategy::MultiStartAscent) {
    TransformResult ms = solve_multistart(fam, theta, ray, cost, lambda, z, cfg);
    // The delta-ball baseline is always available; keep the better value.
    RayProblem v{&fam, &ray, &cost, lambda};
    const double at_delta = v(cost.delta);
    if (at_delta > ms.value) {
      ms.value = at_delta;
      ms.argmax_x = ray.point(cost.delta);
    }
    return ms;
  }
  if (fam.kind() == ObjectiveFamily::Kind::ClampedLinearMargin)
    return solve_clamped(fam, ray, cost, lambda, cfg);
  return solve_logistic_grid(fam, ray, cost, lambda, cfg);
}

double c_delta_transform(const ObjectiveFamily& fam, const std::vector<double>& theta,
                         double delta, Norm norm, const Point& z) {
  if (delta < 0.0) throw std::invalid_argument("c_delta_transform: delta must be >= 0");
  AttackRay ray(fam, theta, norm, z);
  return ray_loss(fam, ray, delta);
}

std::vector<double> attack_point(const ObjectiveFamily& fam, const std::vector<double>& theta,
                                 Norm norm, const Point& z, double t) {
  AttackRay ray(fam, theta, norm, z);
  return ray.point(t);
}

double delta_transform_gap(const ObjectiveFamily& fam, const std::vector<double>& theta,
                           const TransportCost& cost, double lambda, const Dataset& sample,
                           const InnerSolverConfig& cfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("delta_transform_gap: lambda must be > 0");
  double gap = 0.0;
  for (const auto& z : sample.points) {
    const double lc = c_transform(fam, theta, cost, lambda, z, cfg).value;
    const double ld = c_delta_transform(fam, theta, cost.delta, cost.norm, z);
    gap = std::max(gap, lc - ld);
  }
  return gap;
}

}  // namespace otdro
