#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "otdro/objective.hpp"
#include "otdro/rng.hpp"

using namespace otdro;

namespace {

std::vector<double> random_ball(SplitMix64& rng, int k) {
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
}

std::vector<double> random_box(SplitMix64& rng, int d, double B) {
  std::vector<double> x(d);
  for (auto& c : x) c = B * (2.0 * rng.uniform() - 1.0);
  return x;
}

}  // namespace

TEST_CASE("clamped margin values") {
  const auto fam = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::L2, std::nullopt);
  CHECK(fam.loss({0.0, 0.0}, Point{{3.0, -1.0}, 1}) == doctest::Approx(0.5));
  CHECK(fam.loss({1.0, 0.0}, Point{{10.0, 0.0}, 1}) == doctest::Approx(0.0));
  CHECK(fam.loss({1.0, 0.0}, Point{{-10.0, 0.0}, 1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fam.loss({1.0, 1.0}, Point{{0.0, 0.0}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fam.loss({1.0, 0.0}, Point{{0.0, 0.0}, 3}), std::invalid_argument);
}

TEST_CASE("range and Lipschitz constants hold empirically") {
  SplitMix64 rng(11);
  const double B = 2.0;
  const std::vector<ObjectiveFamily> fams = {
      ObjectiveFamily::clamped_linear_margin(3, 1.0, Norm::L2, B),
      ObjectiveFamily::clamped_linear_margin(3, 2.0, Norm::Linf, B),
      ObjectiveFamily::saturated_logistic(3, 1.0, 2.0, Norm::L2, B)};
  for (const auto& fam : fams) {
    const double L_X = fam.L_X();
    const double L_T = fam.L_Theta();
    for (int i = 0; i < 10000; ++i) {
      const auto th = random_ball(rng, 3);
      const auto th2 = random_ball(rng, 3);
      const int y = rng.uniform() < 0.5 ? 1 : -1;
      const auto x = random_box(rng, 3, B);
      const auto x2 = random_box(rng, 3, B);
      const double l = fam.loss(th, Point{x, y});
      CHECK(l >= 0.0);
      CHECK(l <= fam.beta() + 1e-12);
      const double dx = norm_dist(x, x2, fam.x_norm());
      CHECK(std::fabs(l - fam.loss(th, Point{x2, y})) <= L_X * dx + 1e-9);
      double dth = 0.0;
      for (int j = 0; j < 3; ++j) dth += (th[j] - th2[j]) * (th[j] - th2[j]);
      dth = std::sqrt(dth);
      CHECK(std::fabs(l - fam.loss(th2, Point{x, y})) <= L_T * dth + 1e-9);
    }
  }
}

TEST_CASE("gradient matches central differences away from kinks") {
  SplitMix64 rng(5);
  const std::vector<ObjectiveFamily> fams = {
      ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::L2, std::nullopt),
      ObjectiveFamily::saturated_logistic(2, 1.0, 3.0, Norm::L2, std::nullopt)};
  for (const auto& fam : fams) {
    int tested = 0;
    while (tested < 300) {
      const auto th = random_ball(rng, 2);
      const int y = rng.uniform() < 0.5 ? 1 : -1;
      Point z{{4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)}, y};
      if (fam.kind() == ObjectiveFamily::Kind::ClampedLinearMargin) {
        const double raw = fam.beta() / 2.0 - y * (th[0] * z.x[0] + th[1] * z.x[1]);
        if (raw < 1e-3 || raw > fam.beta() - 1e-3) continue;  // skip kink neighborhoods
      }
      const auto g = fam.loss_grad_x(th, z);
      for (int j = 0; j < 2; ++j) {
        Point zp = z, zm = z;
        zp.x[j] += 1e-5;
        zm.x[j] -= 1e-5;
        const double fd = (fam.loss(th, zp) - fam.loss(th, zm)) / 2e-5;
        CHECK(g[j] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
      }
      ++tested;
    }
  }
}

TEST_CASE("gradient special cases") {
  const auto fam = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::L2, std::nullopt);
  // interior point, theta = e1, y = +1: gradient is -e1
  const auto g = fam.loss_grad_x({1.0, 0.0}, Point{{0.1, 0.0}, 1});
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  // zero theta: flat
  const auto g0 = fam.loss_grad_x({0.0, 0.0}, Point{{0.1, 0.0}, 1});
  CHECK(g0[0] == 0.0);
  // clamped region: flat
  const auto gc = fam.loss_grad_x({1.0, 0.0}, Point{{100.0, 0.0}, 1});
  CHECK(gc[0] == 0.0);
}

TEST_CASE("covering number bound") {
  const auto f1 = ObjectiveFamily::clamped_linear_margin(1, 1.0, Norm::L2, 1.0);
  CHECK(f1.L_Theta() == doctest::Approx(1.0));
  CHECK(std::exp(f1.log_covering_number_bound(2.0)) == doctest::Approx(2.0));
  const auto f2 = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::L2,
                                                         1.0 / std::sqrt(2.0));
  CHECK(f2.L_Theta() == doctest::Approx(1.0));
  CHECK(std::exp(f2.log_covering_number_bound(1.0)) == doctest::Approx(9.0));
  CHECK(std::exp(f1.log_covering_number_bound(1e9)) == doctest::Approx(1.0));
}

TEST_CASE("sup of the loss over the box") {
  const double B = 1.0;
  const auto fam = ObjectiveFamily::clamped_linear_margin(2, 1.0, Norm::Linf, B);
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto th = random_ball(rng, 2);
    const double sup = fam.sup_loss_label(th, 1);
    double brute = 0.0;
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b) {
        Point z{{-B + 2.0 * B * a / 20.0, -B + 2.0 * B * b / 20.0}, 1};
        brute = std::max(brute, fam.loss(th, z));
      }
    CHECK(sup >= brute - 1e-9);
    CHECK(sup <= fam.beta() + 1e-12);
  }
}

TEST_CASE("dataset csv round trip and class frequencies") {
  MixtureParams mix;
  mix.dim = 2;
  mix.mean_neg_a = {-1.0, 0.0};
  mix.mean_neg_b = {-2.0, 0.5};
  mix.mean_pos_a = {1.0, 0.0};
  mix.mean_pos_b = {2.0, -0.5};
  mix.sigma = 0.3;
  mix.p_pos = 0.6;
  const Dataset ds = synthesize_dataset(mix, 99, 500, 3.0);
  REQUIRE(ds.size() == 500);
  for (const auto& p : ds.points) {
    CHECK((p.y == 1 || p.y == -1));
    for (double c : p.x) CHECK(std::fabs(c) <= 3.0 + 1e-12);
  }
  const auto probs = ds.class_probs();
  REQUIRE(probs.size() == 2);
  double total = 0.0;
  for (const auto& [y, p] : probs) total += p;
  CHECK(total == doctest::Approx(1.0));

  const std::string path = std::filesystem::temp_directory_path() / "otdro_ds_test.csv";
  ds.to_csv(path);
  const Dataset back = Dataset::from_csv(path);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.points[i].y == ds.points[i].y);
    for (int j = 0; j < 2; ++j)
      CHECK(back.points[i].x[j] == doctest::Approx(ds.points[i].x[j]).epsilon(1e-15));
  }
  std::filesystem::remove(path);

  // determinism of the generator
  const Dataset ds2 = synthesize_dataset(mix, 99, 500, 3.0);
  CHECK(ds2.points[123].x[0] == ds.points[123].x[0]);
}
