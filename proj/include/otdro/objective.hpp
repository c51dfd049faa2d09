#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otdro/transport_cost.hpp"

namespace otdro {

// Bounded Lipschitz loss family over theta in the L2 unit ball of R^k, with
// the constants (beta, L_X, L_Theta, k) the generalization bounds consume.
//
// ClampedLinearMargin: clamp(beta/2 - y <theta, x>, 0, beta), y in {-1,+1}.
// SaturatedLogistic:   beta * sigma(-slope * y <theta, x>).
class ObjectiveFamily {
 public:
  enum class Kind { ClampedLinearMargin, SaturatedLogistic };

  // box_b: half-width of the predictor box X = [-B, B]^k; nullopt means
  // X = R^k (then L_Theta must be supplied for the bound calculators).
  static ObjectiveFamily clamped_linear_margin(int k, double beta, Norm x_norm,
                                               std::optional<double> box_b);
  static ObjectiveFamily saturated_logistic(int k, double beta, double slope, Norm x_norm,
                                            std::optional<double> box_b);

  Kind kind() const { return kind_; }
  int param_dim() const { return k_; }
  double beta() const { return beta_; }
  double slope() const { return slope_; }
  Norm x_norm() const { return x_norm_; }
  std::optional<double> box_b() const { return box_b_; }

  // Lipschitz constant of x -> L_theta(x, y) w.r.t. the predictor norm,
  // uniformly over the unit theta-ball.
  double L_X() const;
  // Lipschitz constant of theta -> L_theta(z) (L2 on theta), over the box.
  double L_Theta() const;

  double loss(const std::vector<double>& theta, const Point& z) const;
  std::vector<double> loss_grad_x(const std::vector<double>& theta, const Point& z) const;

  // sup over x in X of L_theta(x, y); for label-independent families this is
  // also sup over Z when maximized over labels.
  double sup_loss_label(const std::vector<double>& theta, int y) const;
  double sup_loss_global(const std::vector<double>& theta) const;

  // log N(eps, G, sup-norm) <= k log(1 + 2 L_Theta / eps).
  double log_covering_number_bound(double eps) const;

  std::string kind_name() const;

 private:
  ObjectiveFamily() = default;

  Kind kind_ = Kind::ClampedLinearMargin;
  int k_ = 1;
  double beta_ = 1.0;
  double slope_ = 1.0;  // logistic only
  Norm x_norm_ = Norm::L2;
  std::optional<double> box_b_;
};

struct Dataset {
  std::vector<Point> points;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].x.size()); }
  std::size_t size() const { return points.size(); }

  // Per-label empirical frequencies.
  std::vector<std::pair<int, double>> class_probs() const;

  static Dataset from_csv(const std::string& path);
  void to_csv(const std::string& path) const;
};

struct MixtureParams {
  int dim = 1;
  // Two component means per class; classes are labeled -1 and +1.
  std::vector<double> mean_neg_a, mean_neg_b, mean_pos_a, mean_pos_b;
  double sigma = 0.5;
  double p_pos = 0.5;
};

// Two-component Gaussian mixture per class, deterministically seeded.  When a
// box is given, samples are clamped into it so the data lives in X.
Dataset synthesize_dataset(const MixtureParams& params, std::uint64_t seed, std::size_t n,
                           std::optional<double> box_b);

}  // namespace otdro
