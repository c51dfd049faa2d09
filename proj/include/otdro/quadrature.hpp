#pragma once

#include <functional>

namespace otdro {

// Composite Gauss-Legendre with 16-point panels; total_points is rounded up
// to a multiple of 16.
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int total_points);

// Integral over [0, e0] of a mildly singular integrand via the substitution
// u = sqrt(t):  int_0^{e0} f = int_0^{sqrt(e0)} 2 u f(u^2) du.
double sqrt_substitution_panel(const std::function<double(double)>& f, double e0,
                               int total_points = 64);

}  // namespace otdro
