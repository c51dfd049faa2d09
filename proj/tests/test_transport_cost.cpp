#include <doctest.h>

#include <cmath>

#include "otdro/transport_cost.hpp"
#include "support/oracles.hpp"

using namespace otdro;

namespace {

double psi_fn(const Penalty& p, double t) {
  const ExtReal v = p.psi(t);
  return v.is_finite() ? v.value() : 1e300;
}

}  // namespace

TEST_CASE("psi values") {
  CHECK(Penalty::power_law(1.0, 2.0).psi(3.0).value() == doctest::Approx(9.0));
  CHECK(Penalty::hard_ball().psi(0.0).value() == doctest::Approx(0.0));
  CHECK(Penalty::hard_ball().psi(0.5).is_pos_inf());
  CHECK(Penalty::exponential(1.0, 1.0).psi(1.0).value() ==
        doctest::Approx(std::exp(1.0) - 1.0));
  CHECK_THROWS_AS(Penalty::power_law(1.0, 2.0).psi(-1.0), std::invalid_argument);
}

TEST_CASE("psi_star closed forms") {
  CHECK(Penalty::power_law(1.0, 2.0).psi_star(2.0) == doctest::Approx(1.0));
  CHECK(Penalty::power_plus_linear(1.0, 3.0, 2.0).psi_star(2.0) == doctest::Approx(0.0));
  CHECK(Penalty::hard_ball().psi_star(7.0) == doctest::Approx(0.0));
  // breakpoint of the exponential conjugate belongs to the zero branch
  CHECK(Penalty::exponential(2.0, 1.5).psi_star(3.0) == doctest::Approx(0.0));
}

TEST_CASE("psi_star matches the brute-force conjugate") {
  const std::vector<Penalty> families = {
      Penalty::power_law(1.0, 2.0),      Penalty::power_law(0.5, 3.0),
      Penalty::power_plus_linear(1.0, 1.0, 2.0), Penalty::power_plus_linear(2.0, 0.5, 1.5),
      Penalty::exponential(1.0, 1.0),    Penalty::exponential(0.3, 2.0),
      Penalty::hard_ball()};
  for (const auto& p : families) {
    for (int i = 1; i <= 100; ++i) {
      const double s = 0.1 * i;
      // A cap of 50 covers the interior maximizer for every family/grid
      // pair; the objective is concave so the polish is exact.
      const double brute =
          oracles::conjugate([&](double t) { return psi_fn(p, t); }, s, 50.0, 4000);
      CHECK(p.psi_star(s) == doctest::Approx(brute).epsilon(1e-7));
    }
  }
}

TEST_CASE("lambda * psi_star(L/lambda) is non-increasing") {
  for (const auto& p : {Penalty::power_law(1.0, 2.0), Penalty::power_plus_linear(1.0, 1.0, 2.0),
                        Penalty::exponential(0.5, 1.0)}) {
    double prev = 1e309;
    for (int i = 1; i <= 200; ++i) {
      const double lam = 0.05 * i;
      const double cur = lam * p.psi_star(2.0 / lam);
      CHECK(cur <= prev + 1e-10);
      prev = cur;
    }
  }
}

TEST_CASE("lambda_star closed form and thresholds") {
  CHECK(Penalty::power_law(1.0, 2.0).lambda_star(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(Penalty::hard_ball().lambda_star(0.3, 5.0) == doctest::Approx(0.0));
  // Bisected families: the root of lambda psi*(L/lambda) = eps2.  For
  // alpha=eta=1, q=2, L=1: (1-l)^2/(4l) = 10  =>  l = (42 - sqrt(1760)) / 2.
  const double expected = (42.0 - std::sqrt(1760.0)) / 2.0;
  const double got = Penalty::power_plus_linear(1.0, 1.0, 2.0).lambda_star(10.0, 1.0);
  CHECK(got == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("lambda_star output sits exactly at the threshold") {
  const std::vector<Penalty> strict = {Penalty::power_law(1.0, 2.0),
                                       Penalty::power_law(0.7, 3.0),
                                       Penalty::power_plus_linear(1.0, 1.0, 2.0),
                                       Penalty::exponential(0.5, 1.0)};
  for (const auto& p : strict) {
    for (double eps2 : {0.1, 1.0, 10.0}) {
      for (double L : {0.5, 2.0}) {
        const double lam = p.lambda_star(eps2, L);
        if (lam > 0.0) {
          CHECK(lam * p.psi_star(L / lam) <= eps2 + 1e-8);
          if (lam > 2e-6) {
            const double below = lam - 1e-6;
            CHECK(below * p.psi_star(L / below) > eps2);
          }
        }
      }
    }
  }
}

TEST_CASE("lambda_star against a brute-force grid root") {
  for (const auto& p : {Penalty::power_plus_linear(1.0, 1.0, 2.0),
                        Penalty::exponential(1.0, 1.0)}) {
    for (double eps2 : {0.5, 2.0}) {
      const double L = 1.5;
      // scan downward from a lambda where the map is zero
      double lam_scan = 10.0;
      const int N = 500000;
      for (int i = N; i >= 1; --i) {
        const double lam = 10.0 * i / N;
        if (lam * p.psi_star(L / lam) <= eps2) lam_scan = lam;
        else break;
      }
      CHECK(p.lambda_star(eps2, L) == doctest::Approx(lam_scan).epsilon(1e-4));
    }
  }
}

TEST_CASE("cost evaluation") {
  TransportCost c;
  c.penalty = Penalty::power_law(1.0, 2.0);
  c.delta = 1.0;
  c.norm = Norm::L2;
  Point z{{0.0}, 1};
  CHECK(c.cost(z, Point{{0.5}, 1}).value() == doctest::Approx(0.0));  // inside the ball
  CHECK(c.cost(z, Point{{2.0}, 1}).value() == doctest::Approx(1.0));  // psi(2 - 1)
  CHECK(c.cost(z, Point{{0.1}, -1}).is_pos_inf());                    // label change
  CHECK(c.cost(z, z).value() == doctest::Approx(0.0));

  // sandwich against the hard cost: c_{psi,delta} <= c_delta pointwise
  TransportCost hard;
  hard.penalty = Penalty::hard_ball();
  hard.delta = 1.0;
  hard.norm = Norm::L2;
  for (int i = 0; i <= 40; ++i) {
    const double x = 0.1 * i;
    const ExtReal soft = c.cost(z, Point{{x}, 1});
    const ExtReal hardv = hard.cost(z, Point{{x}, 1});
    CHECK(soft <= hardv);
  }
}

TEST_CASE("M validation against the box diameter") {
  TransportCost c;
  c.penalty = Penalty::power_law(1.0, 2.0);
  c.delta = 0.5;
  c.norm = Norm::Linf;
  c.M = 10.0;
  CHECK(c.max_finite_cost_in_box(1.0, 3) == doctest::Approx(std::pow(2.0 - 0.5, 2.0)));
  CHECK_NOTHROW(c.validate_M_against_box(1.0, 3));
  c.M = 1.0;
  CHECK_THROWS_AS(c.validate_M_against_box(1.0, 3), std::invalid_argument);
}
