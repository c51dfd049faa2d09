#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace otdro {

struct GoldenResult {
  double x = 0.0;       // midpoint of the final bracket
  double value = 0.0;   // f(x)
  int evaluations = 0;
};

// Golden-section minimization of a unimodal f on [a, b].  Stops when the
// bracket width drops below xtol or after max_iter shrink steps; returns the
// midpoint of the final bracket.
template <typename F>
GoldenResult golden_section_min(F&& f, double a, double b, double xtol, int max_iter = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;  // 1/phi
  GoldenResult res;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  auto fc = f(c);
  auto fd = f(d);
  res.evaluations = 2;
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
    ++res.evaluations;
  }
  res.x = 0.5 * (a + b);
  return res;
}

// Same, but also evaluates f at the midpoint so .value is usable directly.
template <typename F>
GoldenResult golden_section_min_value(F&& f, double a, double b, double xtol, int max_iter = 200) {
  GoldenResult res = golden_section_min(f, a, b, xtol, max_iter);
  res.value = f(res.x);
  ++res.evaluations;
  return res;
}

// Maximize a concave function on [a, b].
template <typename F>
GoldenResult golden_section_max_value(F&& f, double a, double b, double xtol, int max_iter = 200) {
  GoldenResult res = golden_section_min([&](double x) { return -f(x); }, a, b, xtol, max_iter);
  res.value = f(res.x);
  ++res.evaluations;
  return res;
}

}  // namespace otdro
