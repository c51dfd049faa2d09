#include <doctest.h>

#include <cmath>

#include "otdro/divergence.hpp"
#include "otdro/rng.hpp"
#include "support/oracles.hpp"

using namespace otdro;

TEST_CASE("generator values") {
  const FDivergence kl = FDivergence::kl();
  const FDivergence a2 = FDivergence::alpha(2.0);
  CHECK(kl.f(1.0).value() == doctest::Approx(0.0));
  CHECK(a2.f(3.0).value() == doctest::Approx(4.0));  // (9 - 1) / 2
  CHECK(kl.f(0.0).value() == doctest::Approx(0.0));  // limit of t log t
  CHECK_THROWS_AS(kl.f(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(FDivergence::alpha(1.0), std::invalid_argument);
  CHECK_THROWS_AS(FDivergence::alpha(65.0), std::invalid_argument);
}

TEST_CASE("conjugate values") {
  const FDivergence kl = FDivergence::kl();
  const FDivergence a2 = FDivergence::alpha(2.0);
  CHECK(a2.f_star(1.0) == doctest::Approx(1.0));         // s^2/2 + 1/2 at s = 1
  CHECK(kl.f_star(1.0) == doctest::Approx(1.0));         // f*(s0) = s0
  CHECK(a2.f_star(-5.0) == doctest::Approx(0.5));        // negative branch constant
  CHECK(kl.f_star_rderiv(1.0) == doctest::Approx(1.0));
  CHECK(a2.f_star_rderiv(3.0) == doctest::Approx(3.0));
  CHECK(a2.f_star_rderiv(-1.0) == doctest::Approx(0.0));
}

TEST_CASE("fixed point of the conjugate at s0 across the alpha grid") {
  for (double a : {1.1, 1.5, 2.0, 3.0, 5.0}) {
    const FDivergence f = FDivergence::alpha(a);
    CHECK(f.f_star(f.s0()) == doctest::Approx(f.s0()).epsilon(1e-12));
    CHECK(f.f_star_rderiv(f.s0()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const FDivergence kl = FDivergence::kl();
  CHECK(kl.f_star(kl.s0()) == doctest::Approx(kl.s0()).epsilon(1e-12));
  CHECK(kl.f_star_rderiv(kl.s0()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Fenchel-Young inequality with equality on the subdifferential") {
  auto check_family = [](const FDivergence& f) {
    for (int i = 1; i <= 60; ++i) {
      const double t = 0.05 * i;  // (0, 3]
      for (int j = -20; j <= 20; ++j) {
        const double s = 0.5 * j;
        const double lhs = f.f(t).value() + f.f_star(s);
        CHECK(lhs >= s * t - 1e-9);
      }
      // s in the subdifferential of f at t: equality.
      double s_t;
      if (f.family() == FDivergence::Family::KL) s_t = std::log(t) + 1.0;
      else s_t = std::pow(t, f.alpha_param() - 1.0) / (f.alpha_param() - 1.0);
      CHECK(f.f(t).value() + f.f_star(s_t) == doctest::Approx(s_t * t).epsilon(1e-9));
    }
  };
  check_family(FDivergence::kl());
  for (double a : {1.5, 2.0, 3.0}) check_family(FDivergence::alpha(a));
}

TEST_CASE("conjugate derivative is monotone") {
  for (const FDivergence& f : {FDivergence::kl(), FDivergence::alpha(1.5),
                               FDivergence::alpha(3.0)}) {
    double prev = f.f_star_rderiv(-10.0);
    for (int i = -99; i <= 100; ++i) {
      const double s = 0.1 * i;
      const double cur = f.f_star_rderiv(s);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("nu_tilde closed forms and the derivative condition") {
  const FDivergence kl = FDivergence::kl();
  const FDivergence a2 = FDivergence::alpha(2.0);
  CHECK(kl.nu_tilde(std::exp(-1.0), 0.0) == doctest::Approx(-2.0));
  CHECK(a2.nu_tilde(0.5, 0.0) == doctest::Approx(-2.0));
  CHECK(kl.nu_tilde(0.5, 1.0) == doctest::Approx(-2.0 - std::log(2.0)));
  // (f*)'(-M - nu~) must reach 1/p0.
  SplitMix64 rng(42);
  for (int i = 0; i < 50; ++i) {
    const double p0 = 0.05 + 0.9 * rng.uniform();
    const double M = 2.0 * rng.uniform();
    for (const FDivergence& f : {kl, a2, FDivergence::alpha(1.5)}) {
      const double nu = f.nu_tilde(p0, M);
      CHECK(f.f_star_rderiv(-M - nu) >= 1.0 / p0 - 1e-12 * (1.0 + 1.0 / p0));
    }
  }
}

TEST_CASE("tail_sup closed forms dominate a dense grid") {
  const FDivergence kl = FDivergence::kl();
  const FDivergence a2 = FDivergence::alpha(2.0);
  CHECK(a2.tail_sup(-2.0) == doctest::Approx(4.0));
  CHECK(a2.tail_sup(1.0) == doctest::Approx(0.0));
  CHECK(kl.tail_sup(-2.0) == doctest::Approx(2.0 * std::exp(1.0)));
  for (const FDivergence& f : {kl, a2, FDivergence::alpha(1.5)}) {
    for (double nu : {-3.0, -2.0, -0.5, 0.5}) {
      const double bound = f.tail_sup(nu);
      double actual = 0.0;
      for (int i = 0; i <= 4000; ++i) {
        const double s = nu + i * (30.0 - nu) / 4000.0;
        actual = std::max(actual, std::fabs(s * f.f_star_rderiv(-s)));
      }
      CHECK(actual <= bound + 1e-9);
    }
  }
}

TEST_CASE("finite f-divergence") {
  const FDivergence a2 = FDivergence::alpha(2.0);
  const FDivergence kl = FDivergence::kl();
  CHECK(a2.divergence({0.3, 0.7}, {0.3, 0.7}).value() == doctest::Approx(0.0));
  CHECK(a2.divergence({1.0, 0.0}, {0.5, 0.5}).value() == doctest::Approx(0.5));
  CHECK(kl.divergence({1.0, 0.0}, {0.0, 1.0}).is_pos_inf());

  // Non-negativity with equality only at nu == mu for a strictly convex family.
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> mu(4), nu(4);
    double sm = 0.0, sn = 0.0;
    for (int j = 0; j < 4; ++j) {
      mu[j] = 0.05 + rng.uniform();
      nu[j] = 0.05 + rng.uniform();
      sm += mu[j];
      sn += nu[j];
    }
    double linf = 0.0;
    for (int j = 0; j < 4; ++j) {
      mu[j] /= sm;
      nu[j] /= sn;
      linf = std::max(linf, std::fabs(mu[j] - nu[j]));
    }
    for (const FDivergence& f : {kl, a2}) {
      const double d = f.divergence(nu, mu).value();
      CHECK(d >= -1e-12);
      if (linf > 1e-3) CHECK(d > 1e-9);
    }
  }
}

TEST_CASE("constants bundle is self-consistent") {
  const FDivergence a2 = FDivergence::alpha(2.0);
  const DivergenceConstants c = a2.constants(0.5, 0.0);
  CHECK(c.s0 == doctest::Approx(1.0));
  CHECK(c.inf_f_star == doctest::Approx(0.5));
  CHECK(c.nu_tilde == doctest::Approx(-2.0));
  CHECK(c.tail_sup == doctest::Approx(4.0));
  CHECK(c.C2 == doctest::Approx(2.0));
}
