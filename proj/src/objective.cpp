#include "otdro/objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "otdro/rng.hpp"

namespace otdro {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l1_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_theta(const std::vector<double>& theta, int k) {
  if (static_cast<int>(theta.size()) != k)
    throw std::invalid_argument("theta dimension mismatch");
  if (l2_norm(theta) > 1.0 + 1e-9)
    throw std::invalid_argument("theta must lie in the unit L2 ball");
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Dual-norm sup of <theta, .> over the unit predictor-norm ball, maximized
// over the unit L2 theta-ball.
double dual_norm_sup(Norm x_norm, int k) {
  return x_norm == Norm::L2 ? 1.0 : std::sqrt(static_cast<double>(k));
}

}  // namespace

ObjectiveFamily ObjectiveFamily::clamped_linear_margin(int k, double beta, Norm x_norm,
                                                       std::optional<double> box_b) {
  if (k < 1 || !(beta > 0.0)) throw std::invalid_argument("clamped_linear_margin: bad k or beta");
  ObjectiveFamily f;
  f.kind_ = Kind::ClampedLinearMargin;
  f.k_ = k;
  f.beta_ = beta;
  f.x_norm_ = x_norm;
  f.box_b_ = box_b;
  return f;
}

ObjectiveFamily ObjectiveFamily::saturated_logistic(int k, double beta, double slope, Norm x_norm,
                                                    std::optional<double> box_b) {
  if (k < 1 || !(beta > 0.0) || !(slope > 0.0))
    throw std::invalid_argument("saturated_logistic: bad k, beta or slope");
  ObjectiveFamily f;
  f.kind_ = Kind::SaturatedLogistic;
  f.k_ = k;
  f.beta_ = beta;
  f.slope_ = slope;
  f.x_norm_ = x_norm;
  f.box_b_ = box_b;
  return f;
}

double ObjectiveFamily::L_X() const {
  const double dual = dual_norm_sup(x_norm_, k_);
  if (kind_ == Kind::ClampedLinearMargin) return dual;
  return beta_ * slope_ / 4.0 * dual;  // sup |sigma'| = 1/4
}

double ObjectiveFamily::L_Theta() const {
  if (!box_b_)
    throw std::logic_error("L_Theta requires a bounded predictor box");
  const double sup_x_l2 = *box_b_ * std::sqrt(static_cast<double>(k_));
  if (kind_ == Kind::ClampedLinearMargin) return sup_x_l2;
  return beta_ * slope_ / 4.0 * sup_x_l2;
}

double ObjectiveFamily::loss(const std::vector<double>& theta, const Point& z) const {
  check_theta(theta, k_);
  if (z.y != 1 && z.y != -1)
    throw std::invalid_argument("loss: labels must be -1 or +1");
  const double margin = static_cast<double>(z.y) * dot(theta, z.x);
  if (kind_ == Kind::ClampedLinearMargin)
    return std::clamp(beta_ / 2.0 - margin, 0.0, beta_);
  return beta_ * sigmoid(-slope_ * margin);
}

std::vector<double> ObjectiveFamily::loss_grad_x(const std::vector<double>& theta,
                                                 const Point& z) const {
  check_theta(theta, k_);
  const double margin = static_cast<double>(z.y) * dot(theta, z.x);
  std::vector<double> g(theta.size(), 0.0);
  if (kind_ == Kind::ClampedLinearMargin) {
    const double raw = beta_ / 2.0 - margin;
    if (raw <= 0.0 || raw >= beta_) return g;  // flat (clamped) region
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -static_cast<double>(z.y) * theta[i];
    return g;
  }
  const double u = -slope_ * margin;
  const double s = sigmoid(u);
  const double scale = -beta_ * slope_ * s * (1.0 - s) * static_cast<double>(z.y);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * theta[i];
  return g;
}

double ObjectiveFamily::sup_loss_label(const std::vector<double>& theta, int y) const {
  check_theta(theta, k_);
  // Both families are decreasing in the margin m = y <theta, x>; the sup is
  // attained at the smallest margin reachable in X.
  double min_margin;
  if (!box_b_) {
    min_margin = l2_norm(theta) > 0.0 ? -HUGE_VAL : 0.0;
  } else {
    double s = 0.0;
    for (double ti : theta) s += std::fabs(ti);
    min_margin = -*box_b_ * s;  // coordinate-wise extreme of the box
    (void)y;
  }
  if (kind_ == Kind::ClampedLinearMargin) {
    if (min_margin == -HUGE_VAL) return beta_;
    return std::clamp(beta_ / 2.0 - min_margin, 0.0, beta_);
  }
  if (min_margin == -HUGE_VAL) return beta_;
  return beta_ * sigmoid(-slope_ * min_margin);
}

double ObjectiveFamily::sup_loss_global(const std::vector<double>& theta) const {
  // Label-symmetric families: the per-label sup does not depend on y.
  return sup_loss_label(theta, 1);
}

double ObjectiveFamily::log_covering_number_bound(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("log_covering_number_bound: eps must be > 0");
  return static_cast<double>(k_) * std::log1p(2.0 * L_Theta() / eps);
}

std::string ObjectiveFamily::kind_name() const {
  return kind_ == Kind::ClampedLinearMargin ? "clamped_linear_margin" : "saturated_logistic";
}

std::vector<std::pair<int, double>> Dataset::class_probs() const {
  std::map<int, std::size_t> counts;
  for (const auto& p : points) counts[p.y]++;
  std::vector<std::pair<int, double>> out;
  for (const auto& [y, c] : counts)
    out.emplace_back(y, static_cast<double>(c) / static_cast<double>(points.size()));
  return out;
}

Dataset Dataset::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Dataset::from_csv: cannot open " + path);
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("Dataset::from_csv: empty file");
  // Header "x_1,...,x_d,y".
  std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Point p;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("Dataset::from_csv: short row");
      p.x.push_back(std::stod(cell));
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("Dataset::from_csv: missing label");
    p.y = std::stoi(cell);
    ds.points.push_back(std::move(p));
  }
  return ds;
}

void Dataset::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Dataset::to_csv: cannot open " + path);
  const int d = dim();
  for (int i = 1; i <= d; ++i) out << "x_" << i << ",";
  out << "y\n";
  char buf[64];
  for (const auto& p : points) {
    for (double v : p.x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ",";
    }
    out << p.y << "\n";
  }
}

Dataset synthesize_dataset(const MixtureParams& params, std::uint64_t seed, std::size_t n,
                           std::optional<double> box_b) {
  const int d = params.dim;
  auto check = [&](const std::vector<double>& m, const char* which) {
    if (static_cast<int>(m.size()) != d)
      throw std::invalid_argument(std::string("synthesize_dataset: bad mean ") + which);
  };
  check(params.mean_neg_a, "neg_a");
  check(params.mean_neg_b, "neg_b");
  check(params.mean_pos_a, "pos_a");
  check(params.mean_pos_b, "pos_b");

  SplitMix64 rng = SplitMix64::substream(seed, 0x5a5a5a5aULL);
  Dataset ds;
  ds.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    p.y = rng.uniform() < params.p_pos ? 1 : -1;
    const bool first = rng.uniform() < 0.5;
    const auto& mean = p.y == 1 ? (first ? params.mean_pos_a : params.mean_pos_b)
                                : (first ? params.mean_neg_a : params.mean_neg_b);
    p.x.resize(d);
    for (int j = 0; j < d; ++j) {
      p.x[j] = mean[j] + params.sigma * rng.normal();
      if (box_b) p.x[j] = std::clamp(p.x[j], -*box_b, *box_b);
    }
    ds.points.push_back(std::move(p));
  }
  return ds;
}

}  // namespace otdro
